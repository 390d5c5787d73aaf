//! Punctures a complex at one triangle and projects cycles onto the new
//! harmonic direction. Winding twice doubles the coordinate; going the other
//! way around flips its sign.

use hodge_landmarks::complex::build_complex;
use hodge_landmarks::flow::{flow_matrix, Trajectory};
use hodge_landmarks::harmonic::{embed, HarmonicBasis, HarmonicCache, HarmonicSettings};

fn main() -> hodge_landmarks::error::Result<()> {
    // 3x3 vertex grid, each square cut into two triangles
    let mut tris = Vec::new();
    for r in 0..2 {
        for c in 0..2 {
            let v = r * 3 + c;
            tris.push([v, v + 1, v + 4]);
            tris.push([v, v + 3, v + 4]);
        }
    }
    let sc = build_complex(9, &tris, &[])?;
    let hole = sc.triangle_id([0, 1, 4]).unwrap();
    let basis = HarmonicBasis::build(&sc, &[hole], &HarmonicSettings::default(), &HarmonicCache::new())?;
    println!("hole {hole} {:?}", sc.triangles()[hole]);
    for (e, v) in basis.columns()[0].sparse_entries().iter().filter(|(_, v)| v.abs() > 1e-3) {
        println!("  edge {:?}: {v:+.4}", sc.edges()[*e]);
    }

    let ts = vec![
        Trajectory::new(vec![0, 1, 4, 0]),
        Trajectory::new(vec![0, 1, 4, 0, 1, 4, 0]),
        Trajectory::new(vec![0, 4, 1, 0]),
        Trajectory::new(vec![0, 1, 2, 5, 4, 3, 0]),
        Trajectory::new(vec![4, 5, 8, 7, 4]),
    ];
    let x = embed(&basis, &flow_matrix(&ts, &sc)?)?;
    for (t, row) in ts.iter().zip(x.rows()) {
        println!("{:?} -> {:+.4}", t.vertices, row[0]);
    }
    Ok(())
}
