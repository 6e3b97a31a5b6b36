use pathclass::fixtures;
use pathclass::jointcover::build_joint_cover;

#[test]
fn region_graph_topology_diagnostic() {
    for (name, s) in fixtures::planar_suite() {
        let (jc, g) = build_joint_cover(&s).unwrap();
        let b = jc.free_betti();
        eprintln!(
            "{name}: regions {} adj {} rank {} betti {:?} G_A {:?}",
            jc.regions().len(),
            jc.adjacency().len(),
            jc.region_cycle_rank(),
            b,
            g.hyperedges
        );
    }
    let (jc, _) = build_joint_cover(&fixtures::pillars_3d()).unwrap();
    eprintln!(
        "pillars: regions {} betti {:?} S_W tri {}",
        jc.regions().len(),
        jc.free_betti(),
        jc.complex().triangles.len()
    );
}
