use crate::graph::NodeId;

/// Above this length ratio the shorter list drives a galloping search
/// through the longer one instead of a linear merge.
const GALLOP_RATIO: usize = 32;

/// Calls `f` for every element common to two strictly ascending slices,
/// in ascending order.
#[inline]
pub fn for_each_common<F: FnMut(NodeId)>(a: &[NodeId], b: &[NodeId], mut f: F) {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if small.is_empty() {
        return;
    }
    if large.len() > GALLOP_RATIO * small.len() {
        let mut base = 0;
        for &x in small {
            base += gallop(&large[base..], x);
            if base >= large.len() {
                break;
            }
            if large[base] == x {
                f(x);
                base += 1;
            }
        }
        return;
    }
    let (mut i, mut j) = (0, 0);
    while i < small.len() && j < large.len() {
        let (x, y) = (small[i], large[j]);
        if x < y {
            i += 1;
        } else if x > y {
            j += 1;
        } else {
            f(x);
            i += 1;
            j += 1;
        }
    }
}

pub fn common_count(a: &[NodeId], b: &[NodeId]) -> usize {
    let mut n = 0;
    for_each_common(a, b, |_| n += 1);
    n
}

/// Index of the first element `>= x` in ascending `s`.
#[inline]
fn gallop(s: &[NodeId], x: NodeId) -> usize {
    let mut hi = 1;
    while hi < s.len() && s[hi - 1] < x {
        hi *= 2;
    }
    let lo = hi / 2;
    let hi = hi.min(s.len());
    lo + s[lo..hi].partition_point(|&y| y < x)
}
