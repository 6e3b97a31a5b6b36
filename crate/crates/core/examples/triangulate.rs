//! Delaunay triangulation of a point set and of a scene.
//!
//! `cargo run --example triangulate`

use pathclass::delaunay::{triangulate, Triangulation};
use pathclass::fixtures;
use pathclass::geom::{in_sphere, orient, Point};

fn main() -> pathclass::Result<()> {
    // Exact predicates: four corners of a square are cocircular.
    let sq = [
        Point::new2(0., 0.),
        Point::new2(1., 0.),
        Point::new2(1., 1.),
    ];
    println!("orientation of the corner triangle: {:?}", orient(&sq)?);
    println!(
        "fourth corner against its circumcircle: {:?}",
        in_sphere(&sq, &Point::new2(0., 1.))?
    );

    // The tie is broken by a fixed symbolic perturbation, so the diagonal
    // does not depend on insertion order.
    let corners = [
        Point::new2(0., 0.),
        Point::new2(1., 0.),
        Point::new2(1., 1.),
        Point::new2(0., 1.),
    ];
    let t = Triangulation::from_points(&corners)?;
    println!("unit square: {:?}", t.simplex_sets());
    let mut rev = corners;
    rev.reverse();
    let r = Triangulation::from_points(&rev)?;
    println!("same square, reversed input: {} triangles", r.len());

    let scene = fixtures::two_squares();
    let t = triangulate(&scene)?;
    let inside = (0..t.len())
        .filter(|&s| t.inside_obstacle(s).is_some())
        .count();
    println!(
        "two_squares: {} vertices, {} triangles ({} inside obstacles, {} free)",
        t.points().len(),
        t.len(),
        inside,
        t.len() - inside
    );
    Ok(())
}
