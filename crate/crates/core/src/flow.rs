//! Reduction of an exact-count CSP to integer max-flow.
//!
//! Red clauses are sources, blue clauses are sinks and each variable is a
//! unit arc from its red clause to its blue clause. The CSP is satisfiable
//! iff the max flow saturates every source.

use std::fmt::Write as _;

use thiserror::Error;

use crate::csp::{Assignment, Color, CspInstance, VarId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    pub from: u32,
    pub to: u32,
    pub cap: u64,
    /// The variable this arc stands for, if any.
    pub var: Option<VarId>,
}

/// Clause `i` is node `i`. Its terminal is node `clauses + i`: a source
/// feeding a red clause, or a sink draining a blue one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowNetwork {
    clause_count: usize,
    arcs: Vec<Arc>,
    required: u64,
}

impl FlowNetwork {
    pub fn node_count(&self) -> usize {
        2 * self.clause_count
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Σ over red clauses of their targets.
    pub fn required(&self) -> u64 {
        self.required
    }

    /// `flow <nodes> <arcs> <T>`, then `arc <from> <to> <cap>` lines with a
    /// trailing `var <id>` on variable arcs.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "flow {} {} {}",
            self.node_count(),
            self.arcs.len(),
            self.required
        )
        .unwrap();
        for a in &self.arcs {
            write!(out, "arc {} {} {}", a.from, a.to, a.cap).unwrap();
            if let Some(v) = a.var {
                write!(out, " var {v}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Source arcs first, then variable arcs in variable order, then sink arcs.
pub fn csp_to_flow(csp: &CspInstance) -> FlowNetwork {
    let c = csp.clauses().len();
    let mut arcs = Vec::with_capacity(c + csp.variable_count());
    for (i, clause) in csp.clauses().iter().enumerate() {
        if clause.color == Color::Red {
            arcs.push(Arc {
                from: (c + i) as u32,
                to: i as u32,
                cap: clause.target as u64,
                var: None,
            });
        }
    }
    for (&v, occ) in csp.occurrences() {
        arcs.push(Arc {
            from: occ.red as u32,
            to: occ.blue as u32,
            cap: 1,
            var: Some(v),
        });
    }
    for (i, clause) in csp.clauses().iter().enumerate() {
        if clause.color == Color::Blue {
            arcs.push(Arc {
                from: i as u32,
                to: (c + i) as u32,
                cap: clause.target as u64,
                var: None,
            });
        }
    }
    FlowNetwork {
        clause_count: c,
        arcs,
        required: csp.total(Color::Red),
    }
}

/// Flow value and the flow on each arc of the network, in arc order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowResult {
    pub value: u64,
    pub arc_flow: Vec<u64>,
}

/// A maximum-flow algorithm for multi-source multi-sink networks where
/// source nodes have no incoming arcs and sink nodes no outgoing ones.
pub trait MaxFlowBackend {
    fn max_flow(&self, network: &FlowNetwork) -> FlowResult;
}

/// Blocking-flow phases over BFS level graphs.
#[derive(Clone, Copy, Debug, Default)]
pub struct Dinic;

impl MaxFlowBackend for Dinic {
    fn max_flow(&self, network: &FlowNetwork) -> FlowResult {
        let n = network.node_count();
        let (s, t) = (n, n + 1);
        let mut is_source = vec![false; n];
        let mut is_sink = vec![false; n];
        let mut residual = Residual::with_nodes(n + 2);
        for a in &network.arcs {
            residual.add(a.from as usize, a.to as usize, a.cap);
            if a.var.is_none() {
                if a.from as usize >= network.clause_count {
                    is_source[a.from as usize] = true;
                } else {
                    is_sink[a.to as usize] = true;
                }
            }
        }
        let unbounded = network.arcs.iter().map(|a| a.cap).sum::<u64>() + 1;
        for v in 0..n {
            if is_source[v] {
                residual.add(s, v, unbounded);
            }
            if is_sink[v] {
                residual.add(v, t, unbounded);
            }
        }
        residual.finish();
        let value = residual.run(s, t);
        let arc_flow = (0..network.arcs.len())
            .map(|i| residual.cap[2 * i + 1])
            .collect();
        FlowResult { value, arc_flow }
    }
}

/// Residual graph in compressed adjacency form. Arc `e` and `e ^ 1` are a
/// forward/backward pair.
struct Residual {
    nodes: usize,
    to: Vec<u32>,
    cap: Vec<u64>,
    tail: Vec<u32>,
    start: Vec<usize>,
    adj: Vec<u32>,
}

impl Residual {
    fn with_nodes(nodes: usize) -> Self {
        Residual {
            nodes,
            to: Vec::new(),
            cap: Vec::new(),
            tail: Vec::new(),
            start: Vec::new(),
            adj: Vec::new(),
        }
    }

    fn add(&mut self, from: usize, to: usize, cap: u64) {
        self.to.push(to as u32);
        self.cap.push(cap);
        self.tail.push(from as u32);
        self.to.push(from as u32);
        self.cap.push(0);
        self.tail.push(to as u32);
    }

    fn finish(&mut self) {
        let mut degree = vec![0usize; self.nodes + 1];
        for &u in &self.tail {
            degree[u as usize + 1] += 1;
        }
        for i in 0..self.nodes {
            degree[i + 1] += degree[i];
        }
        self.start = degree.clone();
        let mut fill = degree;
        self.adj = vec![0; self.tail.len()];
        for (e, &u) in self.tail.iter().enumerate() {
            self.adj[fill[u as usize]] = e as u32;
            fill[u as usize] += 1;
        }
    }

    fn run(&mut self, s: usize, t: usize) -> u64 {
        let mut total = 0;
        let mut level = vec![u32::MAX; self.nodes];
        let mut queue = Vec::with_capacity(self.nodes);
        let mut cursor = vec![0usize; self.nodes];
        let mut path: Vec<u32> = Vec::new();
        loop {
            level.fill(u32::MAX);
            level[s] = 0;
            queue.clear();
            queue.push(s as u32);
            let mut head = 0;
            while head < queue.len() {
                let u = queue[head] as usize;
                head += 1;
                for &e in &self.adj[self.start[u]..self.start[u + 1]] {
                    let v = self.to[e as usize] as usize;
                    if self.cap[e as usize] > 0 && level[v] == u32::MAX {
                        level[v] = level[u] + 1;
                        queue.push(v as u32);
                    }
                }
            }
            if level[t] == u32::MAX {
                return total;
            }
            cursor.copy_from_slice(&self.start[..self.nodes]);
            path.clear();
            let mut u = s;
            loop {
                if u == t {
                    let push = path
                        .iter()
                        .map(|&e| self.cap[e as usize])
                        .min()
                        .expect("non-empty path");
                    let mut cut = path.len();
                    for (i, &e) in path.iter().enumerate() {
                        self.cap[e as usize] -= push;
                        self.cap[e as usize ^ 1] += push;
                        if self.cap[e as usize] == 0 && cut == path.len() {
                            cut = i;
                        }
                    }
                    total += push;
                    path.truncate(cut);
                    u = path.last().map_or(s, |&e| self.to[e as usize] as usize);
                    continue;
                }
                let mut advanced = false;
                while cursor[u] < self.start[u + 1] {
                    let e = self.adj[cursor[u]] as usize;
                    let v = self.to[e] as usize;
                    if self.cap[e] > 0 && level[v] == level[u] + 1 {
                        path.push(e as u32);
                        u = v;
                        advanced = true;
                        break;
                    }
                    cursor[u] += 1;
                }
                if advanced {
                    continue;
                }
                if u == s {
                    break;
                }
                // Dead end: drop it from the level graph and retreat.
                level[u] = u32::MAX;
                let e = path.pop().expect("retreat from a non-root node") as usize;
                u = self.tail[e] as usize;
                cursor[u] += 1;
            }
        }
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("max flow {value} is below the required {required}")]
pub struct FlowShortfall {
    pub value: u64,
    pub required: u64,
}

/// Variables whose arcs carry flow are true; requires the flow to saturate.
pub fn extract_assignment(
    network: &FlowNetwork,
    flow: &FlowResult,
) -> Result<Assignment, FlowShortfall> {
    if flow.value != network.required {
        return Err(FlowShortfall {
            value: flow.value,
            required: network.required,
        });
    }
    Ok(network
        .arcs
        .iter()
        .zip(&flow.arc_flow)
        .filter_map(|(a, &f)| a.var.map(|v| (v, f == a.cap)))
        .collect())
}

/// Runs the default backend and extracts a satisfying assignment.
pub fn solve(csp: &CspInstance) -> (FlowNetwork, FlowResult, Result<Assignment, FlowShortfall>) {
    let network = csp_to_flow(csp);
    let flow = Dinic.max_flow(&network);
    let assignment = extract_assignment(&network, &flow);
    (network, flow, assignment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::Clause;

    fn csp(clauses: Vec<Clause>) -> CspInstance {
        CspInstance::new(clauses).unwrap()
    }

    #[test]
    fn single_variable() {
        let c = csp(vec![
            Clause::red(vec![VarId(0)], 1),
            Clause::blue(vec![VarId(0)], 1),
        ]);
        let (net, flow, a) = solve(&c);
        assert_eq!(
            (net.node_count(), net.arcs().len(), net.required()),
            (4, 3, 1)
        );
        assert_eq!(flow.value, 1);
        assert_eq!(a.unwrap().get(VarId(0)), Some(true));
    }

    #[test]
    fn forced_saturation() {
        let c = csp(vec![
            Clause::red(vec![VarId(0), VarId(1)], 2),
            Clause::blue(vec![VarId(0)], 1),
            Clause::blue(vec![VarId(1)], 1),
        ]);
        assert_eq!(solve(&c).1.value, 2);
    }

    #[test]
    fn sink_bound_shortfall() {
        let c = csp(vec![
            Clause::red(vec![VarId(0)], 1),
            Clause::red(vec![VarId(1)], 1),
            Clause::blue(vec![VarId(0), VarId(1)], 1),
        ]);
        let (net, flow, a) = solve(&c);
        assert_eq!((net.required(), flow.value), (2, 1));
        assert_eq!(
            a.unwrap_err(),
            FlowShortfall {
                value: 1,
                required: 2
            }
        );
    }

    #[test]
    fn empty_network() {
        let (net, flow, a) = solve(&csp(Vec::new()));
        assert_eq!((net.node_count(), net.required(), flow.value), (0, 0, 0));
        assert!(a.is_ok());
    }

    #[test]
    fn dump_format() {
        let c = csp(vec![
            Clause::red(vec![VarId(3)], 1),
            Clause::blue(vec![VarId(3)], 1),
        ]);
        assert_eq!(
            csp_to_flow(&c).to_text(),
            "flow 4 3 1\narc 2 0 1\narc 0 1 1 var 3\narc 1 3 1\n"
        );
    }

    #[test]
    fn zero_target_clauses_block_their_variables() {
        let c = csp(vec![
            Clause::red(vec![VarId(0), VarId(1)], 1),
            Clause::blue(vec![VarId(0)], 0),
            Clause::blue(vec![VarId(1)], 1),
        ]);
        let a = solve(&c).2.unwrap();
        assert_eq!(
            (a.get(VarId(0)), a.get(VarId(1))),
            (Some(false), Some(true))
        );
    }
}
