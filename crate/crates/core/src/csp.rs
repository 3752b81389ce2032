//! Exact-count clauses over boolean angle variables, colored so that every
//! variable sits in exactly one red and one blue clause.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

use crate::face_constraints::{generate_face_constraints, FaceConstraints};
use crate::graph::{AngleId, ComponentId, EmbeddedGraph, FaceId, VertexId};

/// A boolean variable: `true` means mountain.
///
/// Ids below the graph's dart count are the angle with the same index;
/// larger ids are fresh variables introduced by face reductions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn angle(a: AngleId) -> VarId {
        VarId(a.0)
    }

    /// The angle this variable stands for, if it is not fresh.
    pub fn as_angle(self, g: &EmbeddedGraph) -> Option<AngleId> {
        (self.index() < g.angle_count()).then_some(AngleId(self.0))
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Hands out fresh variable ids from a private range.
#[derive(Clone, Debug)]
pub struct VarAllocator {
    next: u32,
}

impl VarAllocator {
    pub fn starting_at(first: u32) -> Self {
        VarAllocator { next: first }
    }

    pub fn fresh(&mut self) -> VarId {
        let v = VarId(self.next);
        self.next += 1;
        v
    }

    pub fn peek(&self) -> u32 {
        self.next
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn as_str(self) -> &'static str {
        match self {
            Color::Red => "red",
            Color::Blue => "blue",
        }
    }
}

/// Exactly `target` of `vars` are true.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub color: Color,
    pub vars: Vec<VarId>,
    pub target: u32,
}

impl Clause {
    pub fn red(vars: Vec<VarId>, target: u32) -> Self {
        Clause {
            color: Color::Red,
            vars,
            target,
        }
    }

    pub fn blue(vars: Vec<VarId>, target: u32) -> Self {
        Clause {
            color: Color::Blue,
            vars,
            target,
        }
    }

    /// `None` when some variable is unassigned.
    pub fn is_satisfied(&self, assignment: &Assignment) -> Option<bool> {
        let mut count = 0u32;
        for &v in &self.vars {
            if assignment.get(v)? {
                count += 1;
            }
        }
        Some(count == self.target)
    }
}

/// Partial map from variables to values, dense over variable ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<Option<bool>>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: VarId) -> Option<bool> {
        self.values.get(v.index()).copied().flatten()
    }

    pub fn set(&mut self, v: VarId, value: bool) {
        if self.values.len() <= v.index() {
            self.values.resize(v.index() + 1, None);
        }
        self.values[v.index()] = Some(value);
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, bool)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (VarId(i as u32), v)))
    }
}

impl FromIterator<(VarId, bool)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (VarId, bool)>>(iter: I) -> Self {
        let mut a = Assignment::new();
        for (v, value) in iter {
            a.set(v, value);
        }
        a
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("constraint structure violated: {0}")]
pub struct StructureViolation(pub String);

/// Where a variable occurs, as clause indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Occurrence {
    pub red: usize,
    pub blue: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CspInstance {
    clauses: Vec<Clause>,
    occurrences: BTreeMap<VarId, Occurrence>,
}

impl CspInstance {
    /// Checks that every variable is in exactly one clause of each color and
    /// that no target exceeds its clause size.
    pub fn new(clauses: Vec<Clause>) -> Result<Self, StructureViolation> {
        let mut seen: BTreeMap<VarId, (Option<usize>, Option<usize>)> = BTreeMap::new();
        for (i, c) in clauses.iter().enumerate() {
            if c.target as usize > c.vars.len() {
                return Err(StructureViolation(format!(
                    "clause {i} has target {} over {} variables",
                    c.target,
                    c.vars.len()
                )));
            }
            for &v in &c.vars {
                let slot = seen.entry(v).or_default();
                let place = match c.color {
                    Color::Red => &mut slot.0,
                    Color::Blue => &mut slot.1,
                };
                if let Some(prev) = place {
                    return Err(StructureViolation(format!(
                        "variable {v} is in {} clauses {prev} and {i}",
                        c.color.as_str()
                    )));
                }
                *place = Some(i);
            }
        }
        let mut occurrences = BTreeMap::new();
        for (v, slot) in seen {
            match slot {
                (Some(red), Some(blue)) => {
                    occurrences.insert(v, Occurrence { red, blue });
                }
                (None, _) => {
                    return Err(StructureViolation(format!(
                        "variable {v} has no red clause"
                    )))
                }
                (_, None) => {
                    return Err(StructureViolation(format!(
                        "variable {v} has no blue clause"
                    )))
                }
            }
        }
        Ok(CspInstance {
            clauses,
            occurrences,
        })
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn occurrences(&self) -> &BTreeMap<VarId, Occurrence> {
        &self.occurrences
    }

    pub fn variable_count(&self) -> usize {
        self.occurrences.len()
    }

    pub fn variables(&self) -> impl Iterator<Item = VarId> + '_ {
        self.occurrences.keys().copied()
    }

    pub fn total(&self, color: Color) -> u64 {
        self.clauses
            .iter()
            .filter(|c| c.color == color)
            .map(|c| c.target as u64)
            .sum()
    }

    /// `(T_red, T_blue)`.
    pub fn totals(&self) -> (u64, u64) {
        (self.total(Color::Red), self.total(Color::Blue))
    }

    /// Index of the first clause the assignment fails, if any.
    pub fn first_violated(&self, assignment: &Assignment) -> Option<usize> {
        self.clauses
            .iter()
            .position(|c| c.is_satisfied(assignment) != Some(true))
    }

    pub fn is_satisfied_by(&self, assignment: &Assignment) -> bool {
        self.first_violated(assignment).is_none()
    }

    /// Text form: a `csp <clauses> <variables>` header, then one
    /// `red|blue target v,v,...` line per clause (`-` for no variables).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "csp {} {}", self.clauses.len(), self.variable_count()).unwrap();
        for c in &self.clauses {
            write!(out, "{} {} ", c.color.as_str(), c.target).unwrap();
            if c.vars.is_empty() {
                out.push('-');
            }
            for (i, v) in c.vars.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CspParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Structure(#[from] StructureViolation),
}

impl FromStr for CspInstance {
    type Err = CspParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = |line: usize, message: String| CspParseError::Syntax { line, message };
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| err(1, "missing `csp` header".into()))?;
        let header: Vec<&str> = header.split_whitespace().collect();
        let (clause_count, var_count) = match header.as_slice() {
            ["csp", c, v] => (
                c.parse::<usize>()
                    .map_err(|e| err(1, format!("clause count: {e}")))?,
                v.parse::<usize>()
                    .map_err(|e| err(1, format!("variable count: {e}")))?,
            ),
            _ => return Err(err(1, "expected `csp <clauses> <variables>`".into())),
        };
        let mut clauses = Vec::with_capacity(clause_count);
        for (i, line) in lines {
            let line_no = i + 1;
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [color, target, vars] = fields.as_slice() else {
                return Err(err(line_no, "expected `red|blue target vars`".into()));
            };
            let color = match *color {
                "red" => Color::Red,
                "blue" => Color::Blue,
                other => return Err(err(line_no, format!("unknown color `{other}`"))),
            };
            let target = target
                .parse()
                .map_err(|e| err(line_no, format!("target: {e}")))?;
            let vars = if *vars == "-" {
                Vec::new()
            } else {
                vars.split(',')
                    .map(|v| {
                        v.parse()
                            .map(VarId)
                            .map_err(|e| err(line_no, format!("variable `{v}`: {e}")))
                    })
                    .collect::<Result<_, _>>()?
            };
            clauses.push(Clause {
                color,
                vars,
                target,
            });
        }
        if clauses.len() != clause_count {
            return Err(err(
                1,
                format!(
                    "header promises {clause_count} clauses, found {}",
                    clauses.len()
                ),
            ));
        }
        let csp = CspInstance::new(clauses)?;
        if csp.variable_count() != var_count {
            return Err(err(
                1,
                format!(
                    "header promises {var_count} variables, found {}",
                    csp.variable_count()
                ),
            ));
        }
        Ok(csp)
    }
}

/// One blue clause per non-isolated vertex: exactly one mountain among its
/// non-flat angles, or none when two of its angles are flat.
pub fn generate_vertex_constraints(
    g: &EmbeddedGraph,
    vertices: impl IntoIterator<Item = VertexId>,
    flats: &BTreeSet<AngleId>,
) -> Vec<Clause> {
    let mut out = Vec::new();
    for v in vertices {
        if g.degree(v) == 0 {
            continue;
        }
        let mut vars = Vec::with_capacity(g.degree(v));
        let mut flat = 0;
        for &d in g.rotation(v) {
            if flats.contains(&d.angle()) {
                flat += 1;
            } else {
                vars.push(VarId::angle(d.angle()));
            }
        }
        assert!(
            flat == 0 || flat == 2,
            "flat counts are validated before assembly"
        );
        out.push(Clause::blue(vars, if flat == 0 { 1 } else { 0 }));
    }
    out
}

/// The constraint system of one component, with the per-face reductions kept
/// for witness extension.
#[derive(Clone, Debug)]
pub struct Assembly {
    pub csp: CspInstance,
    pub faces: Vec<FaceConstraints>,
    /// Index of each face's first clause in `csp.clauses()`.
    pub face_offsets: Vec<usize>,
}

/// Builds every face clause set (in face id order) and then every vertex
/// clause (in vertex id order) for one component.
///
/// Faces must already pass closure after merging across `flats`. Fresh
/// variables are numbered upwards from `first_fresh`.
pub fn assemble(
    g: &EmbeddedGraph,
    component: ComponentId,
    exterior: FaceId,
    flats: &BTreeSet<AngleId>,
    first_fresh: u32,
) -> Result<Assembly, StructureViolation> {
    let comp = &g.components()[component.index()];
    let mut alloc = VarAllocator::starting_at(first_fresh);
    let mut clauses = Vec::new();
    let mut faces = Vec::with_capacity(comp.faces.len());
    let mut face_offsets = Vec::with_capacity(comp.faces.len());
    for &f in &comp.faces {
        let cycle = g.face_cycle_with_flats(f, flats, f == exterior);
        if cycle.is_empty() {
            return Err(StructureViolation(format!("face {f} has no folded angles")));
        }
        let fc = generate_face_constraints(&cycle, &mut alloc);
        face_offsets.push(clauses.len());
        clauses.extend(fc.clauses.iter().cloned());
        faces.push(fc);
    }
    clauses.extend(generate_vertex_constraints(
        g,
        comp.vertices.iter().copied(),
        flats,
    ));
    let csp = CspInstance::new(clauses)?;
    Ok(Assembly {
        csp,
        faces,
        face_offsets,
    })
}
