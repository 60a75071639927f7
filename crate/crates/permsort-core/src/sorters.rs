//! Constructive sorters, one per complexity band, each emitting a
//! machine-checkable certificate.
//!
//! A step is applied by right-composition: the current arrangement `c`
//! becomes `c` composed with the step, which rearranges positions (the
//! element at position `step(i)` moves to position `i`). A certificate
//! therefore records steps whose product, in emission order, equals the
//! inverse of the input; [`verify_certificate`] checks exactly that,
//! plus membership of every step in the declared class.
//!
//! None of the sorters searches for optimal step counts; they realize the
//! constructive upper bounds for their class and stay within the documented
//! step budgets. Identity steps are never emitted.

use crate::classes::ClassHandle;
use crate::perm::Perm;
use crate::{Error, Result};

/// A sorting run: the input, the class the steps are drawn from (as a
/// parseable spec string), and the steps in application order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortCertificate {
    pub input: Perm,
    pub class: String,
    pub steps: Vec<Perm>,
}

impl SortCertificate {
    /// Text form: line 1 the input, line 2 the class spec, then one step
    /// per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.input.to_string());
        out.push('\n');
        out.push_str(&self.class);
        out.push('\n');
        for s in &self.steps {
            out.push_str(&s.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<SortCertificate> {
        let mut lines = text.lines();
        let input: Perm = lines
            .next()
            .ok_or_else(|| Error::parse("certificate is empty"))?
            .parse()?;
        let class = lines
            .next()
            .ok_or_else(|| Error::parse("certificate is missing the class line"))?
            .trim()
            .to_string();
        let mut steps = Vec::new();
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            steps.push(line.parse()?);
        }
        Ok(SortCertificate {
            input,
            class,
            steps,
        })
    }
}

/// Checks both certificate invariants: every step has the input's length
/// and belongs to the declared class, and right-composing the input by the
/// steps in order yields the identity. Failures carry the reason.
pub fn verify_certificate(cert: &SortCertificate) -> Result<()> {
    let class = ClassHandle::parse(&cert.class)?;
    let n = cert.input.len();
    let mut current = cert.input.clone();
    for (i, step) in cert.steps.iter().enumerate() {
        if step.len() != n {
            return Err(Error::Verification(format!(
                "step {} has length {}, the input has length {}",
                i + 1,
                step.len(),
                n
            )));
        }
        if !class.member(step) {
            return Err(Error::Verification(format!(
                "step {} ({}) is not a member of {}",
                i + 1,
                step,
                cert.class
            )));
        }
        current = current.compose(step);
    }
    if !current.is_identity() {
        return Err(Error::Verification(format!(
            "steps end at {}, not at the identity",
            current
        )));
    }
    Ok(())
}

fn adjacent_swap(n: usize, j: usize) -> Perm {
    let mut vals: Vec<u16> = (1..=n as u16).collect();
    vals.swap(j, j + 1);
    Perm::from_vals_unchecked(vals)
}

/// (m, 1, ..., m-1, m+1, ..., n): moves the element at position m to the
/// front.
fn front_move(n: usize, m: usize) -> Perm {
    let mut vals: Vec<u16> = Vec::with_capacity(n);
    vals.push(m as u16);
    vals.extend(1..m as u16);
    vals.extend(m as u16 + 1..=n as u16);
    Perm::from_vals_unchecked(vals)
}

/// (j, j-1, ..., 1, j+1, ..., n): reverses the first j positions.
fn prefix_flip(n: usize, j: usize) -> Perm {
    let mut vals: Vec<u16> = (1..=j as u16).rev().collect();
    vals.extend(j as u16 + 1..=n as u16);
    Perm::from_vals_unchecked(vals)
}

/// Repeatedly swaps the leftmost out-of-order adjacent pair. Steps emitted:
/// exactly the inversion count of the input.
pub fn sort_bubble(pi: &Perm) -> SortCertificate {
    let n = pi.len();
    let mut c = pi.clone();
    let mut steps = Vec::new();
    loop {
        let v = c.values();
        let Some(j) = (0..n.saturating_sub(1)).find(|&j| v[j] > v[j + 1]) else {
            break;
        };
        let step = adjacent_swap(n, j);
        c = c.compose(&step);
        steps.push(step);
    }
    SortCertificate {
        input: pi.clone(),
        class: "Bub".to_string(),
        steps,
    }
}

/// Finds the least value v such that v+1, ..., n already appear left to
/// right, then front-inserts v, v-1, ..., 1 in that order. At most n-1
/// steps; inputs starting with n need all of them.
pub fn sort_insertion(pi: &Perm) -> SortCertificate {
    let n = pi.len();
    let mut steps = Vec::new();
    if n >= 2 {
        let mut pos = vec![0usize; n + 1];
        for (i, &x) in pi.values().iter().enumerate() {
            pos[x as usize] = i;
        }
        let mut t = n;
        while t > 1 && pos[t - 1] < pos[t] {
            t -= 1;
        }
        let mut c = pi.clone();
        for u in (1..=t as u16 - 1).rev() {
            let m = c.values().iter().position(|&x| x == u).unwrap() + 1;
            if m == 1 {
                continue;
            }
            let step = front_move(n, m);
            c = c.compose(&step);
            steps.push(step);
        }
        debug_assert!(c.is_identity());
    }
    SortCertificate {
        input: pi.clone(),
        class: "Ins".to_string(),
        steps,
    }
}

/// Alternating compare-exchange rounds on disjoint adjacent pairs, odd
/// pairs first. Each emitted step is a direct sum of 1s and 21s realizing
/// only that round's actual swaps; swap-free rounds emit nothing. At most
/// n steps.
pub fn sort_odd_even(pi: &Perm) -> SortCertificate {
    let n = pi.len();
    let mut c = pi.clone();
    let mut steps = Vec::new();
    let mut parity = 0usize;
    let mut rounds = 0usize;
    while !c.is_identity() {
        let v = c.values();
        let mut vals: Vec<u16> = (1..=n as u16).collect();
        let mut any = false;
        let mut j = parity;
        while j + 1 < n {
            if v[j] > v[j + 1] {
                vals.swap(j, j + 1);
                any = true;
            }
            j += 2;
        }
        if any {
            let step = Perm::from_vals_unchecked(vals);
            c = c.compose(&step);
            steps.push(step);
        }
        parity ^= 1;
        rounds += 1;
        assert!(rounds <= n + 2, "compare-exchange rounds failed to sort");
    }
    SortCertificate {
        input: pi.clone(),
        class: "F".to_string(),
        steps,
    }
}

/// Largest-first prefix reversals: for k = n down to 2, flip the maximum
/// of the first k entries to the front (skipped when already there), then
/// flip the first k (skipped when the maximum already sits at k). At most
/// 2n-3 steps.
pub fn sort_pancake(pi: &Perm) -> SortCertificate {
    let n = pi.len();
    let mut c = pi.clone();
    let mut steps = Vec::new();
    for k in (2..=n).rev() {
        let p = c.values()[..k]
            .iter()
            .position(|&x| x as usize == k)
            .unwrap()
            + 1;
        if p == k {
            continue;
        }
        if p != 1 {
            let flip = prefix_flip(n, p);
            c = c.compose(&flip);
            steps.push(flip);
        }
        let flip = prefix_flip(n, k);
        c = c.compose(&flip);
        steps.push(flip);
    }
    debug_assert!(c.is_identity());
    SortCertificate {
        input: pi.clone(),
        class: "Pan".to_string(),
        steps,
    }
}

/// Radix passes over the bits of value-1, least significant first. Each
/// pass stably gathers the zero-bit elements in front of the one-bit
/// elements; the rearrangement has an increasing prefix and an increasing
/// suffix, so it lies in the two-cell juxtaposition. Identity passes are
/// skipped and the loop stops as soon as the sequence is sorted (a bit
/// pass genuinely rearranges sorted input, so the check must come first);
/// at most ceil(log2 n) steps.
pub fn sort_radix_juxtaposition(pi: &Perm) -> SortCertificate {
    let n = pi.len();
    let mut c = pi.clone();
    let mut steps = Vec::new();
    let bits = if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    };
    for b in 0..bits {
        if c.is_identity() {
            break;
        }
        let v = c.values();
        let mut order: Vec<u16> = Vec::with_capacity(n);
        for want in [0usize, 1] {
            for (i, &x) in v.iter().enumerate() {
                if (x as usize - 1) >> b & 1 == want {
                    order.push(i as u16 + 1);
                }
            }
        }
        let step = Perm::from_vals_unchecked(order);
        if step.is_identity() {
            continue;
        }
        c = c.compose(&step);
        steps.push(step);
    }
    debug_assert!(c.is_identity());
    SortCertificate {
        input: pi.clone(),
        class: "grid([inc,inc])".to_string(),
        steps,
    }
}

/// Merge-style divide and conquer with block rotations. Active segments
/// are halved by value; within a segment, each run of large values is
/// exchanged with the small run immediately to its right, and all
/// exchanges across all segments form one step (a direct sum of
/// rotations). When no segment has a large run before a small run, every
/// segment splits into its halves. At most (ceil(log2 n)+2)^2 steps.
pub fn sort_pbt(pi: &Perm) -> SortCertificate {
    let n = pi.len();
    let mut c = pi.clone();
    let mut steps = Vec::new();
    let mut segments: Vec<(usize, usize)> = if n >= 2 { vec![(1, n)] } else { Vec::new() };
    while !segments.is_empty() {
        let v = c.values();
        let mut vals: Vec<u16> = (1..=n as u16).collect();
        let mut any = false;
        for &(lo, hi) in &segments {
            let half = (hi - lo).div_ceil(2);
            let small = |x: u16| (x as usize) - lo < half;
            let mut p = lo;
            while p <= hi {
                let start = p;
                let starts_small = small(v[p - 1]);
                while p <= hi && small(v[p - 1]) == starts_small {
                    p += 1;
                }
                if !starts_small && p <= hi {
                    let a = p - start;
                    let s_start = p;
                    while p <= hi && small(v[p - 1]) {
                        p += 1;
                    }
                    let b = p - s_start;
                    for i in 0..b {
                        vals[start - 1 + i] = (start + a + i) as u16;
                    }
                    for i in 0..a {
                        vals[start - 1 + b + i] = (start + i) as u16;
                    }
                    any = true;
                }
            }
        }
        if any {
            let step = Perm::from_vals_unchecked(vals);
            c = c.compose(&step);
            steps.push(step);
        } else {
            let mut next = Vec::new();
            for &(lo, hi) in &segments {
                let mid = lo + (hi - lo).div_ceil(2);
                if mid - lo >= 2 {
                    next.push((lo, mid - 1));
                }
                if hi + 1 - mid >= 2 {
                    next.push((mid, hi));
                }
            }
            segments = next;
        }
    }
    debug_assert!(c.is_identity());
    SortCertificate {
        input: pi.clone(),
        class: "PBT".to_string(),
        steps,
    }
}

/// Runs the block-rotation sorter and expands each of its steps into at
/// most two layered steps. A rotation summand moving b values past a is
/// the product of a full reversal of the a+b window and the reversal of
/// each half, both assembled blockwise by direct sum; identity factors
/// are dropped.
pub fn sort_layered(pi: &Perm) -> SortCertificate {
    let base = sort_pbt(pi);
    let mut steps = Vec::new();
    for step in &base.steps {
        let mut first = Perm::identity(0);
        let mut second = Perm::identity(0);
        for comp in step.sum_components() {
            let m = comp.len();
            let a = comp.at(1) - 1;
            if a == 0 {
                first = first.direct_sum(&Perm::identity(m));
                second = second.direct_sum(&Perm::identity(m));
            } else {
                let b = m - a;
                first = first.direct_sum(&Perm::decreasing(m));
                second = second.direct_sum(&Perm::decreasing(b).direct_sum(&Perm::decreasing(a)));
            }
        }
        debug_assert_eq!(first.compose(&second), *step);
        if !first.is_identity() {
            steps.push(first);
        }
        if !second.is_identity() {
            steps.push(second);
        }
    }
    SortCertificate {
        input: pi.clone(),
        class: "L".to_string(),
        steps,
    }
}

/// Simulates each compare-exchange round by one full cyclic pass of
/// end-around moves: elements leave from the back and re-enter at the
/// front, one at a time, or two at a time with a swap when the round
/// exchanges that pair. A full pass is a net rotation back to start, so
/// only the selected swaps remain; swap-free rounds are skipped entirely.
/// At most n passes of at most n steps each.
pub fn sort_peg_ca(pi: &Perm) -> SortCertificate {
    let n = pi.len();
    let mut c = pi.clone();
    let mut steps = Vec::new();
    if n >= 2 {
        let t_one = {
            let mut vals = vec![n as u16];
            vals.extend(1..n as u16);
            Perm::from_vals_unchecked(vals)
        };
        let t_two = {
            let mut vals = vec![n as u16, n as u16 - 1];
            vals.extend(1..=n as u16 - 2);
            Perm::from_vals_unchecked(vals)
        };
        let mut parity = 0usize;
        let mut rounds = 0usize;
        while !c.is_identity() {
            let v = c.values().to_vec();
            let mut any = false;
            let mut j = parity;
            while j + 1 < n {
                if v[j] > v[j + 1] {
                    any = true;
                }
                j += 2;
            }
            if any {
                // Consume positions n down to 1 of the round-start order.
                let mut j = n;
                while j >= 1 {
                    let paired = j >= 2 && (j - parity).is_multiple_of(2) && v[j - 2] > v[j - 1];
                    if paired {
                        c = c.compose(&t_two);
                        steps.push(t_two.clone());
                        j -= 2;
                    } else {
                        c = c.compose(&t_one);
                        steps.push(t_one.clone());
                        j -= 1;
                    }
                }
            }
            parity ^= 1;
            rounds += 1;
            assert!(rounds <= n + 2, "compare-exchange rounds failed to sort");
        }
    }
    SortCertificate {
        input: pi.clone(),
        class: PEG_SPEC.to_string(),
        steps,
    }
}

/// The three-cell peg gridding the end-around sorter draws its steps from.
pub const PEG_SPEC: &str = "grid([pt,.,.],[.,pt,.],[.,.,inc])";

/// The eight sorters, dispatchable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sorter {
    Bubble,
    Insertion,
    OddEven,
    Pancake,
    Radix,
    BlockRotation,
    Layered,
    PegCellular,
}

impl Sorter {
    pub const ALL: [Sorter; 8] = [
        Sorter::Bubble,
        Sorter::Insertion,
        Sorter::OddEven,
        Sorter::Pancake,
        Sorter::Radix,
        Sorter::BlockRotation,
        Sorter::Layered,
        Sorter::PegCellular,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Sorter::Bubble => "bubble",
            Sorter::Insertion => "insertion",
            Sorter::OddEven => "oddeven",
            Sorter::Pancake => "pancake",
            Sorter::Radix => "radix",
            Sorter::BlockRotation => "pbt",
            Sorter::Layered => "layered",
            Sorter::PegCellular => "pegca",
        }
    }

    pub fn from_token(s: &str) -> Option<Sorter> {
        Sorter::ALL.iter().copied().find(|k| k.token() == s)
    }

    /// Spec string of the class the certificate steps belong to.
    pub fn class_spec(self) -> &'static str {
        match self {
            Sorter::Bubble => "Bub",
            Sorter::Insertion => "Ins",
            Sorter::OddEven => "F",
            Sorter::Pancake => "Pan",
            Sorter::Radix => "grid([inc,inc])",
            Sorter::BlockRotation => "PBT",
            Sorter::Layered => "L",
            Sorter::PegCellular => PEG_SPEC,
        }
    }

    pub fn sort(self, pi: &Perm) -> SortCertificate {
        match self {
            Sorter::Bubble => sort_bubble(pi),
            Sorter::Insertion => sort_insertion(pi),
            Sorter::OddEven => sort_odd_even(pi),
            Sorter::Pancake => sort_pancake(pi),
            Sorter::Radix => sort_radix_juxtaposition(pi),
            Sorter::BlockRotation => sort_pbt(pi),
            Sorter::Layered => sort_layered(pi),
            Sorter::PegCellular => sort_peg_ca(pi),
        }
    }

    /// Guaranteed ceiling on emitted steps for inputs of length n.
    pub fn step_bound(self, n: usize) -> u64 {
        let n64 = n as u64;
        let log = ceil_log2(n);
        match self {
            Sorter::Bubble => n64 * n64.saturating_sub(1) / 2,
            Sorter::Insertion => n64.saturating_sub(1),
            Sorter::OddEven => n64,
            Sorter::Pancake => (2 * n64).saturating_sub(3),
            Sorter::Radix => log,
            Sorter::BlockRotation => (log + 2) * (log + 2),
            Sorter::Layered => 2 * (log + 2) * (log + 2),
            Sorter::PegCellular => n64 * n64,
        }
    }
}

fn ceil_log2(n: usize) -> u64 {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as u64
    }
}
