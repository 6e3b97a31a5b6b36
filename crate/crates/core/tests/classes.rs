mod common;

use common::{jitter_polyline, random_free_point, random_polyline};
use pathclass::fixtures;
use pathclass::jointcover::build_joint_cover;
use pathclass::robot::{build_complex, RobotSpec};
use pathclass::states::{h_signature_with, point_path_representation, ray_anchors, same_class};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn point_classes_agree_with_crossing_words() {
    let sb = build_complex(&RobotSpec::point()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (name, scene) in fixtures::planar_suite() {
        let (jc, _) = build_joint_cover(&scene).unwrap();
        let anchors = ray_anchors(&scene).unwrap();
        let (mut same, mut diff) = (0, 0);
        for i in 0..60 {
            let s = random_free_point(&mut rng, &scene);
            let g = random_free_point(&mut rng, &scene);
            let Some(a) = random_polyline(&mut rng, &scene, s, g, 3) else {
                continue;
            };
            let b = if i % 2 == 0 {
                jitter_polyline(&mut rng, &scene, &a, 1.0)
            } else {
                match random_polyline(&mut rng, &scene, s, g, 4) {
                    Some(b) => b,
                    None => continue,
                }
            };
            let ra = point_path_representation(&a, &jc, &sb).unwrap();
            let rb = point_path_representation(&b, &jc, &sb).unwrap();
            let ha = h_signature_with(&a, &scene, &anchors).unwrap();
            let hb = h_signature_with(&b, &scene, &anchors).unwrap();
            let ours = same_class(&ra, &rb).unwrap();
            assert_eq!(ours, ha == hb, "{name}: {a:?} vs {b:?}: {ha} / {hb}");
            if ours {
                same += 1
            } else {
                diff += 1
            }
        }
        eprintln!("{name}: same {same}, different {diff}");
        assert!(same > 0 && diff > 0, "{name}");
    }
}
