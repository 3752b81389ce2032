//! Exact-count clauses for a single face, produced by repeatedly crimping a
//! minimal run of equal-length edges.

use crate::csp::{Assignment, Clause, VarAllocator, VarId};
use crate::graph::{FaceCycle, FaceId};
use crate::length::Length;
use crate::runlist::RunList;

/// A `(y, z)` pair introduced when an even run is crimped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FreshPair {
    pub y: VarId,
    pub z: VarId,
    /// Index of the red clause `y + S = (|S| + 1) / 2` within the face's clauses.
    pub red: usize,
    /// Index of the blue clause `y + z = 1`.
    pub blue: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceConstraints {
    pub face: FaceId,
    pub clauses: Vec<Clause>,
    /// In emission order, so each pair only depends on earlier ones.
    pub fresh: Vec<FreshPair>,
}

impl FaceConstraints {
    /// Fills in every fresh variable from the original angles. Returns false
    /// if some pair is not forced to a boolean, i.e. the angles already
    /// violate a clause.
    pub fn extend(&self, assignment: &mut Assignment) -> bool {
        for pair in &self.fresh {
            let clause = &self.clauses[pair.red];
            let mut sum = 0i64;
            for &v in &clause.vars {
                if v == pair.y {
                    continue;
                }
                match assignment.get(v) {
                    Some(true) => sum += 1,
                    Some(false) => {}
                    None => return false,
                }
            }
            let y = clause.target as i64 - sum;
            if !(0..=1).contains(&y) {
                return false;
            }
            assignment.set(pair.y, y == 1);
            assignment.set(pair.z, y == 0);
        }
        true
    }

    /// True iff `assignment` of the original angles extends to satisfy every clause.
    pub fn accepts(&self, assignment: &Assignment) -> bool {
        let mut full = assignment.clone();
        self.extend(&mut full)
            && self
                .clauses
                .iter()
                .all(|c| c.is_satisfied(&full) == Some(true))
    }
}

/// Clause set for one face. The face must pass closure.
pub fn generate_face_constraints(f: &FaceCycle, alloc: &mut VarAllocator) -> FaceConstraints {
    let entries = f
        .entries
        .iter()
        .map(|e| (e.length.clone(), VarId::angle(e.angle)));
    generate_cycle_constraints(f.face, entries, f.is_exterior, alloc)
}

/// Clause set for a cycle of `(edge length, variable of the angle after it)`.
pub fn generate_cycle_constraints(
    face: FaceId,
    entries: impl IntoIterator<Item = (Length, VarId)>,
    is_exterior: bool,
    alloc: &mut VarAllocator,
) -> FaceConstraints {
    let mut rl = RunList::build(entries);
    assert!(
        rl.edge_count().is_multiple_of(2),
        "face with an odd edge count reached constraint generation"
    );
    let mut clauses = Vec::new();
    let mut fresh = Vec::new();
    loop {
        if rl.is_uniform() {
            let n = rl.edge_count() as i64;
            let target = n / 2 + if is_exterior { 1 } else { -1 };
            assert!(
                (0..=n).contains(&target),
                "terminal target {target} out of range for {n} edges"
            );
            clauses.push(Clause::red(rl.all_angles(), target as u32));
            break;
        }
        let run = rl
            .pop_minimal()
            .expect("a cycle with two or more runs has a minimal run");
        let k = rl.run_edge_count(run);
        let mut vars = rl.incident_angles(run);
        if k % 2 == 1 {
            clauses.push(Clause::red(vars, k.div_ceil(2) as u32));
            rl.crimp_odd(run);
        } else {
            let y = alloc.fresh();
            let z = alloc.fresh();
            vars.insert(0, y);
            let red = clauses.len();
            clauses.push(Clause::red(vars, ((k + 2) / 2) as u32));
            clauses.push(Clause::blue(vec![y, z], 1));
            fresh.push(FreshPair {
                y,
                z,
                red,
                blue: red + 1,
            });
            rl.crimp_even(run, z);
        }
        assert!(rl.edge_count() >= 2, "face shrank below two edges");
    }
    FaceConstraints {
        face,
        clauses,
        fresh,
    }
}
