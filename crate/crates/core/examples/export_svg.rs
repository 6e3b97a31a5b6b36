//! Write every fixture scene as JSON, planar covers as SVG and the 3D one
//! as OBJ, into the directory given on the command line (default
//! `pathclass-out`). The JSON files feed straight into the `pathclass` CLI.

use std::path::PathBuf;

use pathclass::export::{obj, svg};
use pathclass::fixtures;
use pathclass::geom::Point;
use pathclass::jointcover::build_joint_cover;

fn main() -> pathclass::Result<()> {
    let dir = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "pathclass-out".into()),
    );
    std::fs::create_dir_all(&dir)?;
    let mut scenes = fixtures::planar_suite();
    scenes.push(("walled_goal", fixtures::walled_goal()));
    scenes.push(("narrow_passage", fixtures::narrow_passage(0.3)));
    for (name, scene) in &scenes {
        let (jc, _) = build_joint_cover(scene)?;
        std::fs::write(dir.join(format!("{name}.json")), scene.to_json_string())?;
        std::fs::write(dir.join(format!("{name}.svg")), svg(scene, &jc, &[]))?;
        println!("{name}: {} regions", jc.regions().len());
    }

    let pillars = fixtures::pillars_3d();
    let (jc, _) = build_joint_cover(&pillars)?;
    let over = vec![
        Point::new3(5.0, 0.5, 2.0),
        Point::new3(5.0, 1.5, 8.0),
        Point::new3(5.0, 8.5, 8.0),
        Point::new3(5.0, 9.5, 2.0),
    ];
    std::fs::write(dir.join("pillars_3d.json"), pillars.to_json_string())?;
    std::fs::write(dir.join("pillars_3d.obj"), obj(&pillars, &jc, &[over]))?;
    std::fs::write(
        dir.join("four_link_arm.json"),
        serde_json::to_string_pretty(&fixtures::four_link_arm(0.1))?,
    )?;
    println!(
        "pillars_3d: {} regions; files in {}",
        jc.regions().len(),
        dir.display()
    );
    Ok(())
}
