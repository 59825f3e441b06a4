//! Write a generated reference mesh in the text format, read it back and run
//! the reference solver on the file.
//!
//! cargo run --release --example mesh_io

use shallow_junctions::config::ReferenceConfig;
use shallow_junctions::geometry::{build_reference_mesh, load_trimesh};
use shallow_junctions::presets::preset;
use shallow_junctions::simulation::run;

fn main() {
    let mut cfg = preset("test3_shock45").expect("preset");
    let mesh = build_reference_mesh(&cfg.network().expect("network"), 0.1).expect("mesh");
    let path = std::env::temp_dir().join("test3_shock45.mesh");
    std::fs::write(&path, mesh.to_text()).expect("write mesh");
    let back = load_trimesh(&path).expect("read mesh");
    println!(
        "{}: {} vertices, {} triangles, {} boundary edges, area {:.4} m^2",
        path.display(),
        back.vertices.len(),
        back.triangles.len(),
        back.boundary_edge_count(),
        back.total_area()
    );
    cfg.outputs.t_end = 2.0;
    cfg = cfg.as_reference(0.1);
    cfg.numerics.reference = Some(ReferenceConfig { element_size: None, mesh_file: Some(path.display().to_string()) });
    let rep = run(&cfg).expect("run");
    println!("{} steps on the loaded mesh, volume error {:.1e}", rep.steps, rep.volume_error);
}
