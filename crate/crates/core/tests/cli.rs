use std::path::{Path, PathBuf};
use std::process::Command;

use pathclass::fixtures;

fn workdir(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("pathclass-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_pathclass"))
        .args(args)
        .env_remove("PATHCLASS_SEED")
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn decompose_outputs_and_errors() {
    let d = workdir("decompose");
    let scene = write(&d, "two.json", &fixtures::two_squares().to_json_string());
    let out = d.join("cover.json");
    let svg = d.join("cover.svg");
    let (code, _, err) = run(&["decompose", s(&scene), "-o", s(&out), "--svg", s(&svg)]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["schema_version"], 1);
    // the gap between the squares is the one pair region clear of the walls
    let regions = v["cover"]["regions"].as_array().unwrap();
    let pair = regions
        .iter()
        .filter(|r| r["label"] == 5 && r["walls"].as_u64().unwrap_or(0) == 0)
        .count();
    assert_eq!(pair, 1, "{regions:?}");
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));

    let empty = write(
        &d,
        "empty.json",
        r#"{"dimension": 2, "bounds": {"min": [0, 0], "max": [4, 4]}, "obstacles": []}"#,
    );
    let (code, text, _) = run(&["decompose", s(&empty)]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["cover"]["regions"].as_array().unwrap().len(), 1);

    let overlap = write(
        &d,
        "overlap.json",
        r#"{"dimension": 2, "bounds": {"min": [0, 0], "max": [4, 4]}, "obstacles": [
            {"id": 1, "vertices": [[1, 1], [2, 1], [2, 2], [1, 2]]},
            {"id": 2, "vertices": [[1.5, 1.5], [3, 1.5], [3, 3], [1.5, 3]]}]}"#,
    );
    assert_eq!(run(&["decompose", s(&overlap)]).0, 3);
    let broken = write(&d, "broken.json", "{\"dimension\": 2,\n \"bounds\": oops}");
    let (code, _, err) = run(&["decompose", s(&broken)]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2"), "{err}");
    assert_eq!(run(&["frobnicate"]).0, 2);
}

#[test]
fn decompose_output_round_trips() {
    let d = workdir("roundtrip");
    let scene = write(&d, "two.json", &fixtures::two_squares().to_json_string());
    let cover = d.join("cover.json");
    assert_eq!(run(&["decompose", s(&scene), "-o", s(&cover)]).0, 0);
    let (a, b) = (d.join("a.json"), d.join("b.json"));
    let args = |sc: &Path, o: &Path| {
        vec![
            "plan".to_string(),
            s(sc).to_string(),
            "point".into(),
            "[-0.6, 0.37]".into(),
            "[4.6, 0.41]".into(),
            "--alternatives".into(),
            "2".into(),
            "-o".into(),
            s(o).to_string(),
        ]
    };
    let r1 = Command::new(env!("CARGO_BIN_EXE_pathclass"))
        .args(args(&scene, &a))
        .output()
        .unwrap();
    let r2 = Command::new(env!("CARGO_BIN_EXE_pathclass"))
        .args(args(&cover, &b))
        .output()
        .unwrap();
    assert_eq!(r1.status.code(), Some(0));
    assert_eq!(r2.status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&a).unwrap()).unwrap();
    assert_eq!(v["result"]["plans"].as_array().unwrap().len(), 2);
}

#[test]
fn classify_exit_codes() {
    let d = workdir("classify");
    let scene = write(&d, "box.json", &fixtures::single_box().to_json_string());
    let dense = |pts: &[(f64, f64)]| {
        let mut out = Vec::new();
        for w in pts.windows(2) {
            for i in 0..200 {
                let t = i as f64 / 200.0;
                out.push(vec![
                    w[0].0 + t * (w[1].0 - w[0].0),
                    w[0].1 + t * (w[1].1 - w[0].1),
                ]);
            }
        }
        let l = pts.last().unwrap();
        out.push(vec![l.0, l.1]);
        serde_json::json!({ "configurations": out }).to_string()
    };
    let left = write(
        &d,
        "left.json",
        &dense(&[(5., 1.), (1., 1.), (1., 9.), (5., 9.)]),
    );
    let right = write(
        &d,
        "right.json",
        &dense(&[(5., 1.), (9., 1.), (9., 9.), (5., 9.)]),
    );
    let coarse = write(
        &d,
        "coarse.json",
        r#"{"configurations": [[5, 1], [1, 1], [1, 9], [5, 9]]}"#,
    );
    let (code, text, _) = run(&["classify", s(&scene), "point", s(&left), s(&left)]);
    assert_eq!(code, 0);
    assert!(text.contains("SAME"));
    let (code, text, _) = run(&["classify", s(&scene), "point", s(&left), s(&right)]);
    assert_eq!(code, 10);
    assert!(
        text.contains("DIFFERENT") && text.contains("h-signature agreement: yes"),
        "{text}"
    );
    let (code, _, err) = run(&["classify", s(&scene), "point", s(&coarse), s(&left)]);
    assert_eq!(code, 4);
    assert!(err.contains("step"), "{err}");
    assert_eq!(
        run(&[
            "classify",
            s(&scene),
            "point",
            s(&coarse),
            s(&left),
            "--refine"
        ])
        .0,
        0
    );
}

#[test]
fn plan_exit_codes() {
    let d = workdir("plan");
    let walled = write(&d, "walled.json", &fixtures::walled_goal().to_json_string());
    let (code, text, _) = run(&["plan", s(&walled), "point", "[1, 1]", "[8, 3]"]);
    assert_eq!(code, 20);
    assert!(text.contains("Connectivity"));
    let passage = write(
        &d,
        "passage.json",
        &fixtures::narrow_passage(0.3).to_json_string(),
    );
    let robot = write(
        &d,
        "arm.json",
        &serde_json::to_string(&fixtures::four_link_arm(0.1)).unwrap(),
    );
    let start = "[[4,2],[3.2,2],[2.4,2],[1.6,2],[0.8,2]]";
    let goal = "[[8,8],[7.2,8],[6.4,8],[5.6,8],[4.8,8]]";
    let svg = d.join("plan.svg");
    let (code, _, err) = run(&[
        "plan",
        s(&passage),
        s(&robot),
        start,
        goal,
        "--svg",
        s(&svg),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(svg.exists());
    let tight = write(
        &d,
        "tight.json",
        &fixtures::narrow_passage(0.15).to_json_string(),
    );
    assert_eq!(run(&["plan", s(&tight), s(&robot), start, goal]).0, 20);
}

#[test]
fn remove_and_export() {
    let d = workdir("remove");
    let scene = write(
        &d,
        "tri.json",
        &fixtures::triangle_of_boxes().to_json_string(),
    );
    let (code, text, _) = run(&["remove-obstacle", s(&scene), "2"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["removed"], 2);
    assert_eq!(run(&["remove-obstacle", s(&scene), "9"]).0, 3);
    let p3 = write(&d, "pillars.json", &fixtures::pillars_3d().to_json_string());
    let obj = d.join("p.obj");
    assert_eq!(run(&["export", s(&p3), "--obj", s(&obj)]).0, 0);
    assert!(std::fs::read_to_string(&obj)
        .unwrap()
        .contains("g region_0"));
    assert_eq!(run(&["export", s(&p3), "--svg", s(&d.join("x.svg"))]).0, 3);
    let seeded = Command::new(env!("CARGO_BIN_EXE_pathclass"))
        .args(["decompose", s(&scene)])
        .env("PATHCLASS_SEED", "nope")
        .output()
        .unwrap();
    assert_eq!(seeded.status.code(), Some(2));
}
