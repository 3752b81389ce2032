//! Direct check of a mountain/valley assignment on a single cycle.
//!
//! Repeatedly crimps a run of equal edges that is strictly shorter than both
//! neighbours, checking the fold counts around it, until every edge has the
//! same length. Candidate runs are tried most-recent first.

use std::ops::{Add, Sub};

use crate::length::Length;

/// Lengths of a cycle with a fold on each angle. `mountain[i]` is the angle
/// after edge `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssignedCycle {
    pub lengths: Vec<Length>,
    pub mountain: Vec<bool>,
    pub is_exterior: bool,
}

impl AssignedCycle {
    pub fn new(lengths: Vec<Length>, mountain: Vec<bool>, is_exterior: bool) -> Self {
        assert_eq!(lengths.len(), mountain.len(), "one fold per angle");
        AssignedCycle {
            lengths,
            mountain,
            is_exterior,
        }
    }
}

pub fn crimp_check(c: &AssignedCycle) -> bool {
    crimp_check_lengths(&c.lengths, &c.mountain, c.is_exterior)
}

/// Even edge count and equal sums over alternate edges.
pub fn closure_holds<T: Clone + Add<Output = T> + Eq>(lengths: &[T]) -> bool {
    if lengths.is_empty() || lengths.len() % 2 == 1 {
        return false;
    }
    let mut even = lengths[0].clone();
    let mut odd = lengths[1].clone();
    for pair in lengths[2..].chunks(2) {
        even = even + pair[0].clone();
        odd = odd + pair[1].clone();
    }
    even == odd
}

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy)]
struct Run {
    first: u32,
    last: u32,
    count: u32,
    prev: u32,
    next: u32,
    alive: bool,
}

struct Cycle<T> {
    len: Vec<T>,
    /// +1 for mountain, -1 for valley, on the angle after each edge.
    sign: Vec<i32>,
    next_e: Vec<u32>,
    prev_e: Vec<u32>,
    runs: Vec<Run>,
    live: usize,
}

impl<T: Clone + Ord> Cycle<T> {
    fn run_len(&self, r: u32) -> &T {
        &self.len[self.runs[r as usize].first as usize]
    }

    fn minimal(&self, r: u32) -> bool {
        let run = self.runs[r as usize];
        run.alive
            && self.live >= 2
            && self.run_len(r) < self.run_len(run.prev)
            && self.run_len(r) < self.run_len(run.next)
    }

    fn kill(&mut self, r: u32) {
        let Run { prev, next, .. } = self.runs[r as usize];
        self.runs[r as usize].alive = false;
        self.live -= 1;
        self.runs[prev as usize].next = next;
        self.runs[next as usize].prev = prev;
    }

    /// Absorbs `b`, the run right after `a`, into `a`.
    fn absorb_next(&mut self, a: u32) {
        let b = self.runs[a as usize].next;
        let Run { last, count, .. } = self.runs[b as usize];
        self.runs[a as usize].last = last;
        self.runs[a as usize].count += count;
        self.kill(b);
    }
}

/// Linear-time check; `T` is any exact ordered length type.
pub fn crimp_check_lengths<T>(lengths: &[T], mountain: &[bool], is_exterior: bool) -> bool
where
    T: Clone + Ord + Add<Output = T> + Sub<Output = T>,
{
    assert_eq!(lengths.len(), mountain.len());
    if !closure_holds(lengths) {
        return false;
    }
    let n = lengths.len();
    let mut c = Cycle {
        len: lengths.to_vec(),
        sign: mountain.iter().map(|&m| if m { 1 } else { -1 }).collect(),
        next_e: (0..n).map(|i| ((i + 1) % n) as u32).collect(),
        prev_e: (0..n).map(|i| ((i + n - 1) % n) as u32).collect(),
        runs: Vec::new(),
        live: 0,
    };
    let mut total: i32 = c.sign.iter().sum();

    // Runs, scanned from the first edge that starts one.
    match (0..n).find(|&i| lengths[i] != lengths[(i + n - 1) % n]) {
        None => return total == if is_exterior { 2 } else { -2 },
        Some(s) => {
            let mut i = 0;
            while i < n {
                let first = (s + i) % n;
                let mut j = i + 1;
                while j < n && lengths[(s + j) % n] == lengths[first] {
                    j += 1;
                }
                c.runs.push(Run {
                    first: first as u32,
                    last: ((s + j - 1) % n) as u32,
                    count: (j - i) as u32,
                    prev: NONE,
                    next: NONE,
                    alive: true,
                });
                i = j;
            }
        }
    }
    let r = c.runs.len();
    for i in 0..r {
        c.runs[i].prev = ((i + r - 1) % r) as u32;
        c.runs[i].next = ((i + 1) % r) as u32;
    }
    c.live = r;
    let mut stack: Vec<u32> = (0..r as u32).rev().collect();

    while c.live > 1 {
        let Some(r) = stack.pop() else {
            unreachable!("a non-uniform cycle always has a minimal run");
        };
        if !c.minimal(r) {
            continue;
        }
        let Run {
            first,
            count: k,
            prev: p,
            next: nx,
            ..
        } = c.runs[r as usize];
        let pe = c.runs[p as usize].last;
        let ne = c.runs[nx as usize].first;
        let mut s = c.sign[pe as usize];
        let mut e = first;
        for _ in 0..k {
            s += c.sign[e as usize];
            e = c.next_e[e as usize];
        }
        if k % 2 == 1 {
            if s != 0 {
                return false;
            }
            if pe == ne || c.prev_e[pe as usize] == ne {
                // Closure rules these out; a fused edge would meet itself.
                return false;
            }
            let merged = c.len[pe as usize].clone() - c.len[first as usize].clone()
                + c.len[ne as usize].clone();
            let a = c.prev_e[pe as usize];
            c.len[ne as usize] = merged;
            c.next_e[a as usize] = ne;
            c.prev_e[ne as usize] = a;
            let after = c.next_e[ne as usize];

            let q = c.runs.len() as u32;
            c.runs.push(Run {
                first: ne,
                last: ne,
                count: 1,
                prev: p,
                next: nx,
                alive: true,
            });
            c.live += 1;
            c.runs[r as usize].alive = false;
            c.live -= 1;
            c.runs[p as usize].next = q;
            c.runs[nx as usize].prev = q;
            if p == nx {
                let pr = &mut c.runs[p as usize];
                pr.count -= 2;
                pr.first = after;
                pr.last = a;
            } else {
                c.runs[p as usize].count -= 1;
                c.runs[p as usize].last = a;
                if c.runs[p as usize].count == 0 {
                    c.kill(p);
                }
                c.runs[nx as usize].count -= 1;
                c.runs[nx as usize].first = after;
                if c.runs[nx as usize].count == 0 {
                    c.kill(nx);
                }
            }
            let mut q = q;
            let left = c.runs[q as usize].prev;
            if left != q && c.run_len(left) == c.run_len(q) {
                c.absorb_next(left);
                q = left;
            }
            let right = c.runs[q as usize].next;
            if right != q && c.run_len(right) == c.run_len(q) {
                c.absorb_next(q);
            }
            stack.push(c.runs[q as usize].prev);
            stack.push(c.runs[q as usize].next);
            stack.push(q);
        } else {
            if s.abs() != 1 {
                return false;
            }
            // The run's angles collapse into one angle of the majority fold.
            total -= c.sign[pe as usize];
            let mut e = first;
            for _ in 0..k {
                total -= c.sign[e as usize];
                e = c.next_e[e as usize];
            }
            c.sign[pe as usize] = s;
            total += s;
            c.next_e[pe as usize] = ne;
            c.prev_e[ne as usize] = pe;
            c.kill(r);
            if p != nx && c.run_len(p) == c.run_len(nx) {
                c.absorb_next(p);
            }
            stack.push(c.runs[p as usize].prev);
            stack.push(c.runs[p as usize].next);
            stack.push(p);
        }
    }
    total == if is_exterior { 2 } else { -2 }
}

/// Straightforward quadratic version where `choose` picks which of the
/// currently minimal runs to crimp, given their start positions.
pub fn crimp_check_by_choice<T>(
    lengths: &[T],
    mountain: &[bool],
    is_exterior: bool,
    mut choose: impl FnMut(&[usize]) -> usize,
) -> bool
where
    T: Clone + Ord + Add<Output = T> + Sub<Output = T>,
{
    if !closure_holds(lengths) {
        return false;
    }
    let mut cyc: Vec<(T, bool)> = lengths
        .iter()
        .cloned()
        .zip(mountain.iter().copied())
        .collect();
    loop {
        let n = cyc.len();
        if cyc.iter().all(|(l, _)| *l == cyc[0].0) {
            let m = cyc.iter().filter(|(_, m)| *m).count() as i64;
            let v = n as i64 - m;
            return m - v == if is_exterior { 2 } else { -2 };
        }
        // (start, k) of every run strictly shorter than both neighbours.
        let mut minimal = Vec::new();
        for start in 0..n {
            if cyc[start].0 == cyc[(start + n - 1) % n].0 {
                continue;
            }
            let mut k = 1;
            while cyc[(start + k) % n].0 == cyc[start].0 {
                k += 1;
            }
            let before = &cyc[(start + n - 1) % n].0;
            let after = &cyc[(start + k) % n].0;
            if cyc[start].0 < *before && cyc[start].0 < *after {
                minimal.push((start, k));
            }
        }
        let starts: Vec<usize> = minimal.iter().map(|&(s, _)| s).collect();
        let (start, k) = minimal[choose(&starts)];
        // Rotate so the run starts at index 1.
        cyc.rotate_left((start + n - 1) % n);
        let s: i64 = cyc[..=k].iter().map(|(_, m)| if *m { 1 } else { -1 }).sum();
        if k % 2 == 1 {
            if s != 0 || k + 2 > n - 1 {
                return false;
            }
            let merged = cyc[0].0.clone() - cyc[1].0.clone() + cyc[k + 1].0.clone();
            let keep = cyc[k + 1].1;
            cyc.splice(0..k + 2, [(merged, keep)]);
        } else {
            if s.abs() != 1 {
                return false;
            }
            cyc[0].1 = s > 0;
            cyc.drain(1..=k);
        }
    }
}
