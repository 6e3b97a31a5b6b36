//! Named scenes and robots used by the examples and tests.

use crate::geom::Point;
use crate::scene::{Obstacle, Scene};

fn scene2(lo: (f64, f64), hi: (f64, f64), obs: Vec<Obstacle>) -> Scene {
    Scene::new(Point::new2(lo.0, lo.1), Point::new2(hi.0, hi.1), obs).expect("fixture is valid")
}

fn poly(id: u32, v: &[(f64, f64)]) -> Obstacle {
    Obstacle::polygon(id, v).expect("fixture polygon")
}

fn cuboid(id: u32, lo: [f64; 3], hi: [f64; 3]) -> Obstacle {
    Obstacle::aabb(id, &lo, &hi).expect("fixture box")
}

/// Unit squares at x in [0,1] and [3,4] inside [-1,5]^2.
pub fn two_squares() -> Scene {
    scene2(
        (-1., -1.),
        (5., 5.),
        vec![
            poly(1, &[(0., 0.), (1., 0.), (1., 1.), (0., 1.)]),
            poly(2, &[(3., 0.), (4., 0.), (4., 1.), (3., 1.)]),
        ],
    )
}

/// One box in the middle of the workspace.
pub fn single_box() -> Scene {
    scene2(
        (0., 0.),
        (10., 10.),
        vec![poly(
            1,
            &[(4.1, 3.9), (6.2, 4.05), (5.95, 6.1), (3.9, 5.85)],
        )],
    )
}

/// Three boxes at the corners of a triangle, all mutually visible.
pub fn triangle_of_boxes() -> Scene {
    scene2(
        (0., 0.),
        (10., 10.),
        vec![
            poly(1, &[(1.6, 1.7), (3.1, 1.5), (3.3, 2.9), (1.8, 3.2)]),
            poly(2, &[(6.8, 1.6), (8.4, 1.9), (8.2, 3.1), (6.7, 2.8)]),
            poly(3, &[(4.3, 6.9), (5.9, 7.1), (5.6, 8.5), (4.2, 8.2)]),
        ],
    )
}

/// Five convex obstacles of varied shape.
pub fn five_convex() -> Scene {
    scene2(
        (0., 0.),
        (12., 10.),
        vec![
            poly(1, &[(1.2, 1.1), (2.9, 1.4), (2.4, 3.0)]),
            poly(
                2,
                &[(5.1, 0.9), (6.8, 1.3), (7.1, 2.6), (5.6, 3.1), (4.8, 2.2)],
            ),
            poly(3, &[(9.0, 2.1), (10.6, 2.6), (10.1, 4.4), (8.7, 3.7)]),
            poly(4, &[(2.1, 5.6), (4.3, 5.2), (4.6, 7.3), (2.5, 7.9)]),
            poly(5, &[(7.2, 6.0), (8.9, 6.6), (8.1, 8.4), (6.6, 7.7)]),
        ],
    )
}

/// A concave (L-shaped) obstacle next to a convex one.
pub fn notch() -> Scene {
    scene2(
        (0., 0.),
        (10., 8.),
        vec![
            poly(
                1,
                &[
                    (1.5, 1.2),
                    (5.3, 1.4),
                    (5.1, 2.6),
                    (2.8, 2.7),
                    (2.9, 5.9),
                    (1.6, 6.1),
                ],
            ),
            poly(2, &[(6.6, 3.9), (8.3, 4.2), (8.0, 5.8), (6.4, 5.5)]),
        ],
    )
}

/// A wall splits the workspace; the right half is unreachable from the left.
pub fn walled_goal() -> Scene {
    scene2(
        (0., 0.),
        (10., 6.),
        vec![
            poly(1, &[(6., 0.), (6.7, 0.), (6.7, 6.), (6., 6.)]),
            poly(2, &[(2., 2.), (3., 2.), (3., 3.), (2., 3.)]),
        ],
    )
}

/// Two blocks from the side walls leaving a vertical gap of width `gap`
/// around x = 5, the only way between the lower and upper halves.
pub fn narrow_passage(gap: f64) -> Scene {
    let (a, b) = (5.0 - gap / 2.0, 5.0 + gap / 2.0);
    scene2(
        (0., 0.),
        (10., 10.),
        vec![
            poly(1, &[(0.0, 4.5), (a, 4.5), (a, 5.5), (0.0, 5.5)]),
            poly(2, &[(b, 4.5), (10.0, 4.5), (10.0, 5.5), (b, 5.5)]),
        ],
    )
}

/// A planar serial chain of four links for the passage scene.
pub fn four_link_arm(link_width: f64) -> crate::robot::RobotSpec {
    crate::robot::RobotSpec::serial(&[0.8, 0.8, 0.8, 0.8], link_width)
}

/// Two pillars standing on the floor (not reaching the ceiling), each with a
/// platform attached by a small gap.
pub fn pillars_3d() -> Scene {
    Scene::new(
        Point::new3(0., 0., 0.),
        Point::new3(10., 10., 10.),
        vec![
            cuboid(1, [2.0, 4.0, 0.0], [3.0, 6.0, 7.0]),
            cuboid(2, [7.0, 4.0, 0.0], [8.0, 6.0, 7.0]),
            cuboid(3, [3.25, 4.0, 4.0], [4.75, 6.0, 4.5]),
            cuboid(4, [5.25, 4.0, 4.0], [6.75, 6.0, 4.5]),
        ],
    )
    .expect("fixture is valid")
}

/// The five 2D scenes used for the property checks.
pub fn planar_suite() -> Vec<(&'static str, Scene)> {
    vec![
        ("two_squares", two_squares()),
        ("single_box", single_box()),
        ("triangle_of_boxes", triangle_of_boxes()),
        ("five_convex", five_convex()),
        ("notch", notch()),
    ]
}
