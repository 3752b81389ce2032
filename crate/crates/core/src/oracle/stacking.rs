//! Geometric check of a folded cycle by searching for a layer order.
//!
//! Every angle is folded, so edge `i` runs in direction `(-1)^i` along the
//! line. A mountain/valley assignment is realisable iff some total order of
//! the edges (bottom to top) puts each crease's second edge on the correct
//! side of its first, never lets an edge cut between the two layers of a
//! crease it passes through, and never interleaves two creases at the same
//! point folded towards the same side. The turning number of the resulting
//! simple curve then fixes which side of it is the face.
//!
//! The search is exponential; it exists to cross-check the crimp rules on
//! short cycles.

/// True iff the cycle has a valid layer order under `mountain`.
pub fn stacking_check(lengths: &[i64], mountain: &[bool], is_exterior: bool) -> bool {
    let n = lengths.len();
    assert_eq!(n, mountain.len());
    if n == 0 || n % 2 == 1 {
        return false;
    }
    let mut x = vec![0i64; n + 1];
    for i in 0..n {
        x[i + 1] = x[i] + dir(i) * lengths[i];
    }
    if x[n] != 0 {
        return false;
    }
    // Turning by +180 degrees at each valley and -180 at each mountain.
    let m = mountain.iter().filter(|&&m| m).count() as i64;
    let v = n as i64 - m;
    let turning = if is_exterior { m - v } else { v - m };
    if turning != 2 {
        return false;
    }
    let s = Stacking { n, x, mountain };
    let mut order = Vec::with_capacity(n);
    s.search(&mut order)
}

fn dir(i: usize) -> i64 {
    if i.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

struct Stacking<'a> {
    n: usize,
    x: Vec<i64>,
    mountain: &'a [bool],
}

impl Stacking<'_> {
    fn span(&self, e: usize) -> (i64, i64) {
        let (a, b) = (self.x[e], self.x[e + 1]);
        (a.min(b), a.max(b))
    }

    /// Crease `c` joins edge `c` to edge `c + 1` at `x[c + 1]`.
    fn crease_edges(&self, c: usize) -> (usize, usize) {
        (c, (c + 1) % self.n)
    }

    /// Whether edge `c + 1` must lie above edge `c`.
    fn second_above(&self, c: usize) -> bool {
        // The face is on the left of travel, which is above for a +x edge.
        let valley = !self.mountain[c];
        valley == (dir(c) == 1)
    }

    /// Which side of the crease point both edges lie on.
    fn crease_side(&self, c: usize) -> i64 {
        -dir(c)
    }

    fn search(&self, order: &mut Vec<usize>) -> bool {
        let next = order.len();
        if next == self.n {
            return true;
        }
        for at in 0..=order.len() {
            order.insert(at, next);
            if self.consistent(order) && self.search(order) {
                return true;
            }
            order.remove(at);
        }
        false
    }

    fn consistent(&self, order: &[usize]) -> bool {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &e) in order.iter().enumerate() {
            pos[e] = i;
        }
        let placed = |e: usize| pos[e] != usize::MAX;
        let creases: Vec<usize> = (0..self.n)
            .filter(|&c| {
                let (a, b) = self.crease_edges(c);
                placed(a) && placed(b)
            })
            .collect();
        for &c in &creases {
            let (a, b) = self.crease_edges(c);
            if (pos[b] > pos[a]) != self.second_above(c) {
                return false;
            }
            let (lo, hi) = (pos[a].min(pos[b]), pos[a].max(pos[b]));
            let px = self.x[c + 1];
            for (e, &p) in pos.iter().enumerate() {
                if p == usize::MAX || p <= lo || p >= hi {
                    continue;
                }
                let (l, r) = self.span(e);
                if l < px && px < r {
                    return false;
                }
            }
        }
        for (i, &c) in creases.iter().enumerate() {
            for &d in &creases[i + 1..] {
                if self.x[c + 1] != self.x[d + 1] || self.crease_side(c) != self.crease_side(d) {
                    continue;
                }
                let (a, b) = self.crease_edges(c);
                let (p, q) = self.crease_edges(d);
                let (a, b) = (pos[a].min(pos[b]), pos[a].max(pos[b]));
                let (p, q) = (pos[p].min(pos[q]), pos[p].max(pos[q]));
                let interleaved = (a < p && p < b && b < q) || (p < a && a < q && q < b);
                if interleaved {
                    return false;
                }
            }
        }
        true
    }
}
