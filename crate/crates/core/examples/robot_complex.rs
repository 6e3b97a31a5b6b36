//! Robot specifications and the simplicial complex built from them.

use pathclass::fixtures;
use pathclass::geom::Point;
use pathclass::robot::{build_complex, chain_pose, length_error, pose_collides, RobotSpec};

fn main() -> pathclass::Result<()> {
    let spec = fixtures::four_link_arm(0.1);
    println!("{}", serde_json::to_string(&spec).expect("serializable"));
    let sb = build_complex(&spec)?;
    println!("{} key points, edges {:?}", sb.n_vertices, sb.edges);

    let pose = chain_pose(
        &sb,
        &sb.chains[0],
        Point::new2(1.0, 1.0),
        &[0.0, 0.4, 0.4, -0.3],
    )?;
    let scene = fixtures::narrow_passage(0.3);
    println!(
        "pose {:?}",
        pose.iter().map(|p| (p.x(), p.y())).collect::<Vec<_>>()
    );
    println!(
        "length error {:.2e}, collides {}",
        length_error(&sb, &pose),
        pose_collides(&scene, &sb, &pose)
    );

    // A rigid triangle from JSON: key points joined by three links.
    let tri = RobotSpec::from_json_str(
        r#"{"key_points": ["a", "b", "c"],
            "links": [{"a": "a", "b": "b", "length": 1.0},
                      {"a": "b", "b": "c", "length": 1.0},
                      {"a": "c", "b": "a", "length": 1.0}],
            "link_width": 0.05}"#,
    )?;
    let tc = build_complex(&tri)?;
    println!(
        "triangle robot: {} key points, {} edges",
        tc.n_vertices,
        tc.edges.len()
    );
    Ok(())
}
