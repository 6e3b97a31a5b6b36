//! Dropping an obstacle from a cover without re-triangulating.

use pathclass::fixtures;
use pathclass::jointcover::build_joint_cover;

fn main() -> pathclass::Result<()> {
    let scene = fixtures::triangle_of_boxes();
    let (jc, before) = build_joint_cover(&scene)?;
    println!(
        "before: {} regions, G_A nodes {:?} edges {:?}",
        jc.regions().len(),
        before.nodes,
        before.edges
    );
    for id in [2, 3] {
        let (after_jc, after) = jc.what_if_remove(id)?;
        println!(
            "without {id}: {} regions, G_A nodes {:?} edges {:?}, betti {:?}",
            after_jc.regions().len(),
            after.nodes,
            after.edges,
            after_jc.free_betti()
        );
    }
    match jc.what_if_remove(9) {
        Err(e) => println!("removing 9: {e}"),
        Ok(_) => unreachable!("no obstacle 9 in this scene"),
    }
    Ok(())
}
