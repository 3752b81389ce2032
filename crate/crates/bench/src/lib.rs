//! Inputs shared by the benchmarks.

use graphfold::csp::VarAllocator;
use graphfold::face_constraints::generate_cycle_constraints;
use graphfold::oracle::generate::zigzag_face_lengths;
use graphfold::oracle::{grid_instance, unit_grid_instance};
use graphfold::{FaceConstraints, FaceId, Instance, Length, VarId};

/// An `n`-edge closed zigzag face, with angle variables `0..n`.
pub fn zigzag_face(n: usize, seed: u64) -> Vec<(Length, VarId)> {
    zigzag_face_lengths(n, seed)
        .into_iter()
        .zip((0..n as u32).map(VarId))
        .collect()
}

/// Clauses for an interior face given as `(length, angle variable)` pairs.
pub fn face_clauses(face: &[(Length, VarId)]) -> FaceConstraints {
    let mut alloc = VarAllocator::starting_at(face.len() as u32);
    generate_cycle_constraints(FaceId(0), face.iter().cloned(), false, &mut alloc)
}

/// Square grids whose angle count is close to `target`.
pub fn grid_near(target: usize, mixed: bool) -> Instance {
    let side = ((target as f64 / 4.0).sqrt().round() as usize).max(1);
    if mixed {
        grid_instance(side, side, 7)
    } else {
        unit_grid_instance(side, side)
    }
}
