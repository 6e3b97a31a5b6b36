//! Free regions, their labels, and the obstacle adjacency graph.

use pathclass::fixtures;
use pathclass::geom::Point;
use pathclass::jointcover::build_joint_cover;

fn main() -> pathclass::Result<()> {
    let scene = fixtures::triangle_of_boxes();
    let (jc, graph) = build_joint_cover(&scene)?;
    println!(
        "{} obstacles, {} free regions",
        jc.n_obstacles(),
        jc.regions().len()
    );
    for r in jc.regions() {
        println!(
            "  region {:>2}: label {:>4}  obstacles {:?}  walls {:04b}  compact {}  simplices {}",
            r.id,
            r.label,
            r.adjacent_obstacles,
            r.walls,
            r.compact,
            r.simplices.len()
        );
    }
    println!("G_A edges: {:?}", graph.edges);
    println!("G_A hyperedges: {:?}", graph.hyperedges);
    println!("betti numbers of free space: {:?}", jc.free_betti());

    let p = Point::new2(5.0, 4.2);
    let r = jc.region_of_point(&p)?;
    println!(
        "point {:?} lies in region {} (label {})",
        p.coords(),
        r,
        jc.region(r).label
    );
    Ok(())
}
