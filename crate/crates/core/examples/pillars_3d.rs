//! Two pillars joined by a split bridge. Free space has no loops, so every
//! path below is homotopic to every other, yet the region sequences tell
//! five routes apart.

use pathclass::fixtures;
use pathclass::geom::Point;
use pathclass::jointcover::build_joint_cover;
use pathclass::robot::{build_complex, RobotSpec};
use pathclass::states::{point_path_representation, same_class};

fn main() -> pathclass::Result<()> {
    let scene = fixtures::pillars_3d();
    let (jc, graph) = build_joint_cover(&scene)?;
    let sb = build_complex(&RobotSpec::point())?;
    println!(
        "{} regions, betti {:?}, G_A edges {:?}",
        jc.regions().len(),
        jc.free_betti(),
        graph.edges
    );

    let s = Point::new3(5.0137, 0.5713, 2.0291);
    let g = Point::new3(5.0213, 9.4377, 2.0119);
    let lanes = [
        ("left of both pillars", 1.0171, 2.0313),
        ("between left pillar and bridge", 3.1219, 4.2377),
        ("over the bridge", 5.0311, 8.0173),
        ("between bridge and right pillar", 6.8783, 4.2611),
        ("right of both pillars", 9.0127, 2.0457),
    ];
    let mut reps = Vec::new();
    for (name, x, z) in lanes {
        let path = [
            s,
            Point::new3(x, 1.5133, z),
            Point::new3(x + 0.0071, 8.4919, z + 0.0037),
            g,
        ];
        let rep = point_path_representation(&path, &jc, &sb)?;
        println!("{name:>32}: regions {:?}", rep.region_sequence(0).concat());
        reps.push(rep);
    }
    let mut distinct = 0;
    for i in 0..reps.len() {
        if (0..i).all(|j| !same_class(&reps[i], &reps[j]).unwrap_or(true)) {
            distinct += 1;
        }
    }
    println!(
        "{distinct} distinct classes among {} homotopic paths",
        reps.len()
    );
    Ok(())
}
