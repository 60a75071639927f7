//! Exact sorting-time computation by breadth-first search over S_n.
//!
//! A class sorts a permutation `p` in `k` steps when `p` composed with `k`
//! members of the class (one after another, on the right) reaches the
//! identity, or equivalently when the inverse of `p` is a product of `k`
//! members. [`DistanceTable`] records, for every permutation of a fixed
//! length, the least number of factors needed to express it: entry `d` for a
//! permutation `q` means `q` is a product of `d` members and of no fewer.
//! The sorting time of `p` is then the entry of `p`'s inverse, and the
//! worst-case sorting time is the largest entry, provided every permutation
//! was reached at all.
//!
//! Tables are built by BFS from the identity, multiplying on the left by
//! each member of the class level. The reachable set is the subgroup
//! generated by the level, so the table also answers "can this class sort
//! length n at all" and "how large is the generated subgroup".
//!
//! [`RinTable`] plays the same game with a fixed pair of classes: distance
//! zero is granted to every rotation and reversed rotation, and steps
//! multiply by members of the rotation-extended adjacent-swap level. The
//! resulting statistic lower-bounds sorting times for classes contained in
//! that level, and grows with the total cyclic displacement of the input.

use std::io::{Read, Write};

use crate::classes::{ClassHandle, ClassSpec, NamedClass};
use crate::perm::Perm;
use crate::{Error, Result};

/// Distances are stored one byte per permutation; 255 marks "never reached".
const UNREACHED: u8 = u8::MAX;

/// Largest length accepted without `allow_large` (the table is n! bytes).
pub const DEFAULT_MAX_N: usize = 10;

/// Hard ceiling. An 11-entry table is ~40 MiB; 12 would be ~480 MiB.
pub const ABSOLUTE_MAX_N: usize = 11;

/// fact[i] = i!, enough for every length the tables accept.
pub(crate) const FACT: [u64; 13] = [
    1, 1, 2, 6, 24, 120, 720, 5040, 40320, 362880, 3628800, 39916800, 479001600,
];

/// Bijection between permutations of a fixed length and 0..n! in
/// lexicographic order. The identity always ranks 0.
#[derive(Clone)]
pub(crate) struct RankCodec {
    n: usize,
}

impl RankCodec {
    pub(crate) fn new(n: usize) -> RankCodec {
        assert!(n < FACT.len(), "rank codec supports lengths up to 12");
        RankCodec { n }
    }

    pub(crate) fn total(&self) -> u64 {
        FACT[self.n]
    }

    pub(crate) fn rank(&self, vals: &[u16]) -> u32 {
        debug_assert_eq!(vals.len(), self.n);
        let n = self.n;
        let mut r = 0u64;
        for i in 0..n {
            let vi = vals[i];
            let mut smaller_right = 0u64;
            for &vj in &vals[i + 1..] {
                if vj < vi {
                    smaller_right += 1;
                }
            }
            r += smaller_right * FACT[n - 1 - i];
        }
        r as u32
    }

    pub(crate) fn unrank_into(&self, rank: u32, out: &mut [u16]) {
        let n = self.n;
        debug_assert_eq!(out.len(), n);
        let mut avail = [0u16; 12];
        for (i, a) in avail[..n].iter_mut().enumerate() {
            *a = (i + 1) as u16;
        }
        let mut rem = rank as u64;
        for i in 0..n {
            let f = FACT[n - 1 - i];
            let d = (rem / f) as usize;
            rem %= f;
            out[i] = avail[d];
            avail.copy_within(d + 1..n - i, d);
        }
    }
}

/// Knobs for table construction.
#[derive(Clone, Copy, Debug)]
pub struct BfsOptions {
    /// Expand frontier chunks on the rayon pool when the `parallel` feature
    /// is compiled in. Marking stays sequential and in frontier order, so
    /// the resulting table is identical either way.
    pub parallel: bool,
    /// Permit n = 11, which allocates a ~40 MiB table. Larger lengths are
    /// always refused.
    pub allow_large: bool,
}

// Derivable only when the parallel feature is off and the cfg! is false.
#[allow(clippy::derivable_impls)]
impl Default for BfsOptions {
    fn default() -> Self {
        BfsOptions {
            parallel: cfg!(feature = "parallel"),
            allow_large: false,
        }
    }
}

fn check_size(n: usize, opts: &BfsOptions) -> Result<()> {
    if n > ABSOLUTE_MAX_N {
        return Err(Error::ResourceLimit(format!(
            "length {n} needs a {n}!-entry table; the hard limit is {ABSOLUTE_MAX_N}"
        )));
    }
    if n > DEFAULT_MAX_N && !opts.allow_large {
        return Err(Error::ResourceLimit(format!(
            "length {n} allocates a ~40 MiB table; set allow_large to proceed"
        )));
    }
    Ok(())
}

struct BfsOutcome {
    dist: Vec<u8>,
    reached: u64,
    max_dist: u8,
}

/// Multi-source BFS over S_n. States are ranks; a step replaces `x` by
/// `g` composed with `x` for each generator `g`, so the states at distance
/// `k` from the seeds are exactly the k-fold products (times a seed).
fn bfs_run(n: usize, seeds: &[u32], gens: &[u16], opts: &BfsOptions) -> Result<BfsOutcome> {
    let codec = RankCodec::new(n);
    let total = codec.total() as usize;
    let gcount = gens.len().checked_div(n).unwrap_or(0);
    let mut dist = vec![UNREACHED; total];
    let mut frontier: Vec<u32> = Vec::with_capacity(seeds.len());
    for &s in seeds {
        let slot = &mut dist[s as usize];
        if *slot == UNREACHED {
            *slot = 0;
            frontier.push(s);
        }
    }
    let mut reached = frontier.len() as u64;
    let mut max_dist = 0u8;
    let mut level = 0u32;
    while !frontier.is_empty() && reached < total as u64 && gcount > 0 {
        level += 1;
        if level > (UNREACHED - 1) as u32 {
            return Err(Error::ResourceLimit(
                "distance exceeded 254, which the one-byte table cannot record".into(),
            ));
        }
        let batches = expand(n, &codec, &frontier, gens, gcount, &dist, opts);
        let mut next = Vec::new();
        for batch in batches {
            for r in batch {
                let slot = &mut dist[r as usize];
                if *slot == UNREACHED {
                    *slot = level as u8;
                    next.push(r);
                    reached += 1;
                }
            }
        }
        if !next.is_empty() {
            max_dist = level as u8;
        }
        frontier = next;
    }
    Ok(BfsOutcome {
        dist,
        reached,
        max_dist,
    })
}

/// One frontier expansion. Candidates are pre-filtered against the distance
/// array, which nobody writes during this phase; duplicates across chunks
/// are resolved by the sequential marking pass.
fn expand(
    n: usize,
    codec: &RankCodec,
    frontier: &[u32],
    gens: &[u16],
    gcount: usize,
    dist: &[u8],
    opts: &BfsOptions,
) -> Vec<Vec<u32>> {
    #[cfg(feature = "parallel")]
    {
        if opts.parallel && frontier.len() > 1 {
            use rayon::prelude::*;
            let per_state = gcount.max(1);
            let chunk = (4_000_000 / per_state).max(1);
            return frontier
                .par_chunks(chunk)
                .map(|part| expand_chunk(n, codec, part, gens, gcount, dist))
                .collect();
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = opts;
    vec![expand_chunk(n, codec, frontier, gens, gcount, dist)]
}

fn expand_chunk(
    n: usize,
    codec: &RankCodec,
    part: &[u32],
    gens: &[u16],
    gcount: usize,
    dist: &[u8],
) -> Vec<u32> {
    let mut out = Vec::new();
    let mut x = [0u16; 12];
    let mut y = [0u16; 12];
    for &r in part {
        codec.unrank_into(r, &mut x[..n]);
        for g in 0..gcount {
            let gv = &gens[g * n..(g + 1) * n];
            for i in 0..n {
                y[i] = gv[(x[i] - 1) as usize];
            }
            let nr = codec.rank(&y[..n]);
            if dist[nr as usize] == UNREACHED {
                out.push(nr);
            }
        }
    }
    out
}

/// Per-length table of factorization distances for one class.
///
/// Entry `d` at the rank of `q` means: `q` is a product of `d` members of
/// the class level and of no fewer (255 = not a product of any number of
/// members). Built once, it answers sorting-time queries for every
/// permutation of that length.
pub struct DistanceTable {
    spec: String,
    n: usize,
    dist: Vec<u8>,
    reached: u64,
    max_dist: u8,
}

impl DistanceTable {
    /// Runs the BFS for `class` at length `n`.
    pub fn build(class: &ClassHandle, n: usize, opts: &BfsOptions) -> Result<DistanceTable> {
        check_size(n, opts)?;
        let mut gens: Vec<u16> = Vec::new();
        class.canonical().for_each_member(n, &mut |p| {
            if !p.is_identity() {
                gens.extend_from_slice(p.values());
            }
        });
        let out = bfs_run(n, &[0], &gens, opts)?;
        Ok(DistanceTable {
            spec: class.canonical_string().to_string(),
            n,
            dist: out.dist,
            reached: out.reached,
            max_dist: out.max_dist,
        })
    }

    /// Canonical spec string of the class the table was built for.
    pub fn spec(&self) -> &str {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Order of the subgroup generated by the class level.
    pub fn generated_order(&self) -> u64 {
        self.reached
    }

    /// True when every permutation of this length is a product of members.
    pub fn can_sort(&self) -> bool {
        self.reached == FACT[self.n]
    }

    /// Worst-case sorting time at this length, or None when some
    /// permutation cannot be sorted at all.
    pub fn wst(&self) -> Option<u32> {
        if self.can_sort() {
            Some(self.max_dist as u32)
        } else {
            None
        }
    }

    /// Least number of steps that sorts `p`, or None when no number does.
    /// The identity takes zero steps.
    pub fn sorting_time(&self, p: &Perm) -> Result<Option<u32>> {
        if p.len() != self.n {
            return Err(Error::domain(format!(
                "permutation has length {}, table is for length {}",
                p.len(),
                self.n
            )));
        }
        let codec = RankCodec::new(self.n);
        let r = codec.rank(p.inverse().values());
        let d = self.dist[r as usize];
        Ok(if d == UNREACHED { None } else { Some(d as u32) })
    }

    /// How many permutations sit at each distance, from 0 to the maximum.
    pub fn distance_histogram(&self) -> Vec<u64> {
        let mut h = vec![0u64; self.max_dist as usize + 1];
        for &d in &self.dist {
            if d != UNREACHED {
                h[d as usize] += 1;
            }
        }
        h
    }

    /// Recovers one optimal step sequence for `p` by walking the table
    /// backwards. The returned steps, applied left to right, sort `p`;
    /// their product in that order is the inverse of `p`. Returns None
    /// when `p` cannot be sorted. Needs the class the table was built for,
    /// and materializes its level, so keep to moderate lengths.
    pub fn shortest_steps(&self, class: &ClassHandle, p: &Perm) -> Result<Option<Vec<Perm>>> {
        if class.canonical_string() != self.spec {
            return Err(Error::domain(format!(
                "table was built for {}, not {}",
                self.spec,
                class.canonical_string()
            )));
        }
        if p.len() != self.n {
            return Err(Error::domain(format!(
                "permutation has length {}, table is for length {}",
                p.len(),
                self.n
            )));
        }
        let codec = RankCodec::new(self.n);
        let mut target = p.inverse();
        let mut d = match self.dist[codec.rank(target.values()) as usize] {
            UNREACHED => return Ok(None),
            d => d,
        };
        let gens: Vec<(Perm, Perm)> = class
            .level(self.n)
            .iter()
            .filter(|g| !g.is_identity())
            .map(|g| (g.clone(), g.inverse()))
            .collect();
        let mut steps: Vec<Perm> = Vec::with_capacity(d as usize);
        while d > 0 {
            let mut found = false;
            for (g, ginv) in &gens {
                let x = ginv.compose(&target);
                if self.dist[codec.rank(x.values()) as usize] == d - 1 {
                    steps.push(g.clone());
                    target = x;
                    d -= 1;
                    found = true;
                    break;
                }
            }
            if !found {
                return Err(Error::BadTable(
                    "distance table is inconsistent with the class level".into(),
                ));
            }
        }
        Ok(Some(steps))
    }

    /// Writes the table in the PSWB1 binary layout: the magic bytes,
    /// the spec string (u32 little-endian length, then bytes), the length
    /// n as u32 little-endian, then exactly n! distance bytes in rank order.
    pub fn save<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(b"PSWB1")?;
        let spec_bytes = self.spec.as_bytes();
        w.write_all(&(spec_bytes.len() as u32).to_le_bytes())?;
        w.write_all(spec_bytes)?;
        w.write_all(&(self.n as u32).to_le_bytes())?;
        w.write_all(&self.dist)?;
        Ok(())
    }

    /// Reads a table written by [`save`](Self::save), validating the magic,
    /// the length bound, the byte count, and that the identity sits at
    /// distance zero.
    pub fn load<R: Read>(r: &mut R) -> Result<DistanceTable> {
        let mut magic = [0u8; 5];
        r.read_exact(&mut magic)?;
        if &magic != b"PSWB1" {
            return Err(Error::BadTable("bad magic bytes".into()));
        }
        let mut b4 = [0u8; 4];
        r.read_exact(&mut b4)?;
        let spec_len = u32::from_le_bytes(b4) as usize;
        if spec_len > (1 << 20) {
            return Err(Error::BadTable("unreasonable spec length".into()));
        }
        let mut spec_bytes = vec![0u8; spec_len];
        r.read_exact(&mut spec_bytes)?;
        let spec = String::from_utf8(spec_bytes)
            .map_err(|_| Error::BadTable("spec string is not utf-8".into()))?;
        r.read_exact(&mut b4)?;
        let n = u32::from_le_bytes(b4) as usize;
        if n > ABSOLUTE_MAX_N {
            return Err(Error::BadTable(format!(
                "length {n} exceeds the supported range"
            )));
        }
        let mut dist = Vec::new();
        r.read_to_end(&mut dist)?;
        if dist.len() as u64 != FACT[n] {
            return Err(Error::BadTable(format!(
                "expected {} distance bytes, found {}",
                FACT[n],
                dist.len()
            )));
        }
        if dist[0] != 0 {
            return Err(Error::BadTable("identity must sit at distance 0".into()));
        }
        let mut reached = 0u64;
        let mut max_dist = 0u8;
        for &d in &dist {
            if d != UNREACHED {
                reached += 1;
                if d > max_dist {
                    max_dist = d;
                }
            }
        }
        Ok(DistanceTable {
            spec,
            n,
            dist,
            reached,
            max_dist,
        })
    }
}

/// Worst-case sorting time of `class` at length `n`; None when the class
/// cannot sort that length.
pub fn wst(class: &ClassHandle, n: usize, opts: &BfsOptions) -> Result<Option<u32>> {
    Ok(DistanceTable::build(class, n, opts)?.wst())
}

/// Least number of steps that sorts `p`, building a fresh table.
pub fn sorting_time(class: &ClassHandle, p: &Perm, opts: &BfsOptions) -> Result<Option<u32>> {
    DistanceTable::build(class, p.len(), opts)?.sorting_time(p)
}

/// Whether the class level at length `n` generates all of S_n.
pub fn can_sort_at(class: &ClassHandle, n: usize, opts: &BfsOptions) -> Result<bool> {
    Ok(DistanceTable::build(class, n, opts)?.can_sort())
}

/// Order of the subgroup of S_n generated by the class level.
pub fn generated_subgroup_order(class: &ClassHandle, n: usize, opts: &BfsOptions) -> Result<u64> {
    Ok(DistanceTable::build(class, n, opts)?.generated_order())
}

/// Least k with k * level_size^k >= n!, a floor on the worst-case sorting
/// time of any class whose level at length n has `level_size` members:
/// fewer steps cannot even name n! distinct products. None when the level
/// is empty or n! overflows the arithmetic.
pub fn counting_lower_bound(n: usize, level_size: u64) -> Option<u64> {
    if level_size == 0 || n > 34 {
        return None;
    }
    let mut target: u128 = 1;
    for i in 2..=n.max(1) {
        target *= i as u128;
    }
    if level_size == 1 {
        return u64::try_from(target).ok();
    }
    let mut pow: u128 = 1;
    for k in 1..=256u64 {
        pow = pow.saturating_mul(level_size as u128);
        if (k as u128).saturating_mul(pow) >= target {
            return Some(k);
        }
    }
    None
}

/// Distance from the rotations: entry for `q` is the least number of
/// rotation-extended adjacent-swap factors that carry some rotation or
/// reversed rotation to `q`.
pub struct RinTable {
    n: usize,
    dist: Vec<u8>,
}

impl RinTable {
    pub fn build(n: usize, opts: &BfsOptions) -> Result<RinTable> {
        check_size(n, opts)?;
        let codec = RankCodec::new(n);
        let seeds: Vec<u32> = ClassSpec::named(NamedClass::Rr)
            .enumerate_level(n)
            .iter()
            .map(|p| codec.rank(p.values()))
            .collect();
        let mut gens: Vec<u16> = Vec::new();
        ClassSpec::named(NamedClass::T).for_each_member(n, &mut |p| {
            if !p.is_identity() {
                gens.extend_from_slice(p.values());
            }
        });
        let out = bfs_run(n, &seeds, &gens, opts)?;
        Ok(RinTable { n, dist: out.dist })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rin(&self, p: &Perm) -> Result<u32> {
        if p.len() != self.n {
            return Err(Error::domain(format!(
                "permutation has length {}, table is for length {}",
                p.len(),
                self.n
            )));
        }
        let codec = RankCodec::new(self.n);
        let d = self.dist[codec.rank(p.values()) as usize];
        debug_assert_ne!(d, UNREACHED, "adjacent swaps reach every permutation");
        Ok(d as u32)
    }
}

/// Rotation-insertion distance of a single permutation.
pub fn rin(p: &Perm, opts: &BfsOptions) -> Result<u32> {
    RinTable::build(p.len(), opts)?.rin(p)
}

/// Largest rotation-insertion distance over the class level at length `n`
/// (zero when the level is empty).
pub fn rin_of_class(class: &ClassHandle, n: usize, opts: &BfsOptions) -> Result<u32> {
    let table = RinTable::build(n, opts)?;
    let codec = RankCodec::new(n);
    let mut best = 0u32;
    class.canonical().for_each_member(n, &mut |p| {
        let d = table.dist[codec.rank(p.values()) as usize];
        if d != UNREACHED && (d as u32) > best {
            best = d as u32;
        }
    });
    Ok(best)
}
