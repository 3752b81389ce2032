//! Maximal runs of equal-length edges around a face, kept in a cyclic
//! doubly-linked list, plus a FIFO of runs strictly shorter than both
//! neighbours.
//!
//! Both lists live in arenas indexed by `u32`. A crimp touches at most the
//! popped run and its two neighbours, so every splice is constant time apart
//! from the angles it consumes.

use std::collections::VecDeque;

use crate::csp::VarId;
use crate::length::Length;

const NIL: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct EdgeNode {
    len: Length,
    /// Variable of the angle after this edge.
    angle: VarId,
    prev: u32,
    next: u32,
}

#[derive(Clone, Debug)]
struct RunNode {
    first: u32,
    last: u32,
    count: usize,
    prev: u32,
    next: u32,
    alive: bool,
    queued: bool,
}

/// Handle to a run returned by [`RunList::pop_minimal`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunRef(u32);

#[derive(Clone, Debug)]
pub struct RunList {
    edges: Vec<EdgeNode>,
    runs: Vec<RunNode>,
    head: u32,
    live_runs: usize,
    edge_count: usize,
    queue: VecDeque<u32>,
}

impl RunList {
    /// Builds the run list for a cycle of `(edge length, angle after it)`.
    pub fn build(entries: impl IntoIterator<Item = (Length, VarId)>) -> RunList {
        let mut edges: Vec<EdgeNode> = entries
            .into_iter()
            .map(|(len, angle)| EdgeNode {
                len,
                angle,
                prev: NIL,
                next: NIL,
            })
            .collect();
        let n = edges.len();
        assert!(n > 0, "empty face cycle");
        for i in 0..n {
            edges[i].prev = ((i + n - 1) % n) as u32;
            edges[i].next = ((i + 1) % n) as u32;
        }
        let mut rl = RunList {
            edges,
            runs: Vec::new(),
            head: 0,
            live_runs: 0,
            edge_count: n,
            queue: VecDeque::new(),
        };
        // Start at a run boundary so no run wraps past the end of the scan.
        let start = (0..n).find(|&i| rl.edges[i].len != rl.edges[(i + n - 1) % n].len);
        match start {
            None => rl.push_run(0, (n - 1) as u32, n),
            Some(s) => {
                let mut i = 0;
                while i < n {
                    let first = (s + i) % n;
                    let mut count = 1;
                    while i + count < n && rl.edges[(s + i + count) % n].len == rl.edges[first].len
                    {
                        count += 1;
                    }
                    rl.push_run(first as u32, ((s + i + count - 1) % n) as u32, count);
                    i += count;
                }
            }
        }
        let r = rl.runs.len() as u32;
        for i in 0..r {
            rl.runs[i as usize].prev = (i + r - 1) % r;
            rl.runs[i as usize].next = (i + 1) % r;
        }
        for i in 0..r {
            rl.enqueue_if_minimal(i);
        }
        rl
    }

    fn push_run(&mut self, first: u32, last: u32, count: usize) {
        self.runs.push(RunNode {
            first,
            last,
            count,
            prev: NIL,
            next: NIL,
            alive: true,
            queued: false,
        });
        self.live_runs += 1;
    }

    #[inline]
    fn run_len(&self, r: u32) -> &Length {
        &self.edges[self.runs[r as usize].first as usize].len
    }

    fn is_minimal(&self, r: u32) -> bool {
        let run = &self.runs[r as usize];
        if !run.alive || self.live_runs < 2 {
            return false;
        }
        let len = self.run_len(r);
        len < self.run_len(run.prev) && len < self.run_len(run.next)
    }

    fn enqueue_if_minimal(&mut self, r: u32) {
        if !self.runs[r as usize].queued && self.is_minimal(r) {
            self.runs[r as usize].queued = true;
            self.queue.push_back(r);
        }
    }

    fn unlink_run(&mut self, r: u32) {
        let (prev, next) = {
            let run = &mut self.runs[r as usize];
            debug_assert!(run.alive);
            run.alive = false;
            (run.prev, run.next)
        };
        self.live_runs -= 1;
        if self.live_runs > 0 {
            self.runs[prev as usize].next = next;
            self.runs[next as usize].prev = prev;
        }
        if self.head == r {
            self.head = next;
        }
    }

    /// Appends run `src` onto the end of its predecessor `dst`.
    fn merge_into_prev(&mut self, dst: u32, src: u32) {
        debug_assert_eq!(self.runs[src as usize].prev, dst);
        let (last, count) = (self.runs[src as usize].last, self.runs[src as usize].count);
        let d = &mut self.runs[dst as usize];
        d.last = last;
        d.count += count;
        self.unlink_run(src);
    }

    /// Number of edges currently on the face.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// True once every remaining edge has the same length.
    pub fn is_uniform(&self) -> bool {
        self.live_runs == 1
    }

    /// `(length, edge count)` of every run, cyclically from the head run.
    pub fn runs(&self) -> Vec<(Length, usize)> {
        let mut out = Vec::with_capacity(self.live_runs);
        let mut r = self.head;
        for _ in 0..self.live_runs {
            out.push((self.run_len(r).clone(), self.runs[r as usize].count));
            r = self.runs[r as usize].next;
        }
        out
    }

    /// Queued runs that are still minimal, in queue order.
    pub fn pending(&self) -> Vec<(Length, usize)> {
        self.queue
            .iter()
            .filter(|&&r| self.is_minimal(r))
            .map(|&r| (self.run_len(r).clone(), self.runs[r as usize].count))
            .collect()
    }

    /// Takes the first queued run that is still strictly shorter than both
    /// neighbours. Entries invalidated by earlier splices are dropped.
    pub fn pop_minimal(&mut self) -> Option<RunRef> {
        while let Some(r) = self.queue.pop_front() {
            self.runs[r as usize].queued = false;
            if self.is_minimal(r) {
                return Some(RunRef(r));
            }
        }
        None
    }

    pub fn run_length(&self, run: RunRef) -> &Length {
        self.run_len(run.0)
    }

    pub fn run_edge_count(&self, run: RunRef) -> usize {
        self.runs[run.0 as usize].count
    }

    /// The angles touching the run's edges: the one before its first edge,
    /// then the one after each of its edges.
    pub fn incident_angles(&self, run: RunRef) -> Vec<VarId> {
        let node = &self.runs[run.0 as usize];
        let mut out = Vec::with_capacity(node.count + 1);
        let before = self.runs[node.prev as usize].last;
        out.push(self.edges[before as usize].angle);
        let mut e = node.first;
        for _ in 0..node.count {
            out.push(self.edges[e as usize].angle);
            e = self.edges[e as usize].next;
        }
        out
    }

    /// Every remaining angle, walking from the head run.
    pub fn all_angles(&self) -> Vec<VarId> {
        let mut out = Vec::with_capacity(self.edge_count);
        let mut e = self.runs[self.head as usize].first;
        for _ in 0..self.edge_count {
            out.push(self.edges[e as usize].angle);
            e = self.edges[e as usize].next;
        }
        out
    }

    /// Replaces the run and both flanking edges with one edge of length
    /// `before - run + after`, then restores the run invariants.
    pub fn crimp_odd(&mut self, run: RunRef) {
        let r = run.0;
        let (p, n, k) = {
            let node = &self.runs[r as usize];
            (node.prev, node.next, node.count)
        };
        let pe = self.runs[p as usize].last;
        let ne = self.runs[n as usize].first;
        // One long edge closing an odd run cannot satisfy closure.
        assert_ne!(pe, ne, "crimp would fuse an edge with itself");
        if p == n {
            assert!(
                self.runs[p as usize].count >= 3,
                "crimp would leave an odd face"
            );
        }
        let merged = self.edges[pe as usize].len.clone() - self.run_len(r).clone()
            + self.edges[ne as usize].len.clone();
        let (before, after) = (self.edges[pe as usize].prev, self.edges[ne as usize].next);
        let new_edge = self.edges.len() as u32;
        self.edges.push(EdgeNode {
            len: merged,
            angle: self.edges[ne as usize].angle,
            prev: before,
            next: after,
        });
        self.edges[before as usize].next = new_edge;
        self.edges[after as usize].prev = new_edge;
        self.edge_count -= k + 1;

        self.unlink_run(r);
        let q = self.runs.len() as u32;
        self.runs.push(RunNode {
            first: new_edge,
            last: new_edge,
            count: 1,
            prev: p,
            next: n,
            alive: true,
            queued: false,
        });
        self.live_runs += 1;
        self.runs[p as usize].next = q;
        self.runs[n as usize].prev = q;
        if p == n {
            let pr = &mut self.runs[p as usize];
            pr.count -= 2;
            pr.first = after;
            pr.last = before;
        } else {
            self.runs[p as usize].count -= 1;
            self.runs[p as usize].last = before;
            if self.runs[p as usize].count == 0 {
                self.unlink_run(p);
            }
            self.runs[n as usize].count -= 1;
            self.runs[n as usize].first = after;
            if self.runs[n as usize].count == 0 {
                self.unlink_run(n);
            }
        }

        let mut q = q;
        let left = self.runs[q as usize].prev;
        if left != q && self.run_len(left) == self.run_len(q) {
            self.merge_into_prev(left, q);
            q = left;
        }
        let right = self.runs[q as usize].next;
        if right != q && self.run_len(right) == self.run_len(q) {
            self.merge_into_prev(q, right);
        }
        let (left, right) = (self.runs[q as usize].prev, self.runs[q as usize].next);
        self.enqueue_if_minimal(left);
        self.enqueue_if_minimal(q);
        self.enqueue_if_minimal(right);
    }

    /// Removes the run's edges, joining its neighbours at a single new angle
    /// carrying `z`, then restores the run invariants.
    pub fn crimp_even(&mut self, run: RunRef, z: VarId) {
        let r = run.0;
        let (p, n, k) = {
            let node = &self.runs[r as usize];
            (node.prev, node.next, node.count)
        };
        let pe = self.runs[p as usize].last;
        let ne = self.runs[n as usize].first;
        self.edges[pe as usize].next = ne;
        self.edges[ne as usize].prev = pe;
        self.edges[pe as usize].angle = z;
        self.edge_count -= k;
        self.unlink_run(r);
        if p != n && self.run_len(p) == self.run_len(n) {
            self.merge_into_prev(p, n);
        }
        let next = self.runs[p as usize].next;
        self.enqueue_if_minimal(p);
        self.enqueue_if_minimal(next);
    }

    /// Checks adjacency and queue invariants; used by tests.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut r = self.head;
        let mut edges = 0;
        for _ in 0..self.live_runs {
            let node = &self.runs[r as usize];
            if !node.alive {
                return Err(format!("dead run {r} reachable"));
            }
            if self.live_runs > 1 && self.run_len(node.next) == self.run_len(r) {
                return Err(format!(
                    "adjacent runs {r} and {} share a length",
                    node.next
                ));
            }
            let mut e = node.first;
            for i in 0..node.count {
                if self.edges[e as usize].len != *self.run_len(r) {
                    return Err(format!("run {r} edge {i} has a different length"));
                }
                if i + 1 == node.count && e != node.last {
                    return Err(format!("run {r} last pointer is stale"));
                }
                e = self.edges[e as usize].next;
            }
            if e != self.runs[node.next as usize].first {
                return Err(format!("run {r} is not followed by its successor"));
            }
            edges += node.count;
            r = node.next;
        }
        if r != self.head {
            return Err("run list does not close".into());
        }
        if edges != self.edge_count {
            return Err(format!(
                "runs hold {edges} edges, expected {}",
                self.edge_count
            ));
        }
        let mut r = self.head;
        for _ in 0..self.live_runs {
            if self.is_minimal(r) && !self.runs[r as usize].queued {
                return Err(format!("minimal run {r} missing from the queue"));
            }
            r = self.runs[r as usize].next;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(values: &[u32]) -> RunList {
        RunList::build(
            values
                .iter()
                .enumerate()
                .map(|(i, &v)| (Length::from(v), VarId(i as u32))),
        )
    }

    fn runs_of(rl: &RunList) -> Vec<(u32, usize)> {
        rl.runs()
            .into_iter()
            .map(|(l, c)| (l.to_string().parse().unwrap(), c))
            .collect()
    }

    fn pending_of(rl: &RunList) -> Vec<(u32, usize)> {
        rl.pending()
            .into_iter()
            .map(|(l, c)| (l.to_string().parse().unwrap(), c))
            .collect()
    }

    #[test]
    fn build_examples() {
        let rl = build(&[2, 1, 2, 3]);
        assert_eq!(runs_of(&rl), [(2, 1), (1, 1), (2, 1), (3, 1)]);
        assert_eq!(pending_of(&rl), [(1, 1)]);

        let rl = build(&[1, 1, 2, 2]);
        assert_eq!(runs_of(&rl), [(1, 2), (2, 2)]);
        assert_eq!(pending_of(&rl), [(1, 2)]);

        let rl = build(&[5, 5, 5, 5]);
        assert_eq!(runs_of(&rl), [(5, 4)]);
        assert!(rl.pending().is_empty());
        assert!(rl.is_uniform());
    }

    #[test]
    fn wrapped_run_is_one_entry() {
        let rl = build(&[1, 2, 2, 1]);
        assert_eq!(runs_of(&rl), [(2, 2), (1, 2)]);
        rl.check_invariants().unwrap();
    }

    #[test]
    fn odd_crimp_consolidates_with_equal_neighbour() {
        let mut rl = build(&[2, 1, 2, 3]);
        let run = rl.pop_minimal().unwrap();
        assert_eq!(rl.incident_angles(run), [VarId(0), VarId(1)]);
        rl.crimp_odd(run);
        assert_eq!(runs_of(&rl), [(3, 2)]);
        assert_eq!(rl.edge_count(), 2);
        assert!(rl.is_uniform());
        rl.check_invariants().unwrap();
        assert_eq!(rl.all_angles(), [VarId(3), VarId(2)]);
    }

    #[test]
    fn even_crimp_attaches_new_angle() {
        let mut rl = build(&[1, 1, 2, 2]);
        let run = rl.pop_minimal().unwrap();
        assert_eq!(rl.incident_angles(run), [VarId(3), VarId(0), VarId(1)]);
        rl.crimp_even(run, VarId(10));
        assert_eq!(runs_of(&rl), [(2, 2)]);
        rl.check_invariants().unwrap();
        let mut angles = rl.all_angles();
        angles.sort();
        assert_eq!(angles, [VarId(2), VarId(10)]);
    }

    #[test]
    fn odd_crimp_with_wrapping_neighbour() {
        // [4,2,3,2,4,5]: fusing 4,2,3 gives a 5 that joins the trailing 5 across the seam.
        let mut rl = build(&[4, 2, 3, 2, 4, 5]);
        assert_eq!(pending_of(&rl), [(2, 1), (2, 1)]);
        let run = rl.pop_minimal().unwrap();
        rl.crimp_odd(run);
        assert_eq!(runs_of(&rl), [(2, 1), (4, 1), (5, 2)]);
        assert_eq!(pending_of(&rl), [(2, 1)]);
        rl.check_invariants().unwrap();
    }
}
