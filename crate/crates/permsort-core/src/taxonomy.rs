//! Places a class specification into one of five worst-case sorting-cost
//! bands, with an evidence trace and an explicit confidence level. The ladder
//! combines exact finite checks (closure failures, witness permutations) with
//! bounded-size semi-decisions that are labeled as such.

use std::fmt;

use crate::classes::ClassHandle;
use crate::classes::ClassSpec;
use crate::engine::{self, BfsOptions, FACT};
use crate::perm::Perm;
use crate::Result;

/// The five worst-case regimes, from unsortable to single-step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Band {
    CannotSort,
    Quadratic,
    Linear,
    Polylog,
    OneStep,
}

impl Band {
    pub fn as_str(self) -> &'static str {
        match self {
            Band::CannotSort => "cannot_sort",
            Band::Quadratic => "quadratic",
            Band::Linear => "linear",
            Band::Polylog => "polylog",
            Band::OneStep => "one_step",
        }
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Confidence {
    Exact,
    UpToSize(usize),
}

impl fmt::Display for Confidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Confidence::Exact => f.write_str("exact"),
            Confidence::UpToSize(n) => write!(f, "up to size {n}"),
        }
    }
}

/// One executed check with its outcome and the witness backing it.
#[derive(Clone, Debug)]
pub struct Evidence {
    pub check: String,
    pub result: String,
    pub witness: String,
}

impl Evidence {
    fn new(check: &str, result: impl Into<String>, witness: impl Into<String>) -> Self {
        Evidence {
            check: check.to_string(),
            result: result.into(),
            witness: witness.into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub band: Band,
    pub confidence: Confidence,
    pub evidence: Vec<Evidence>,
}

impl Verdict {
    pub fn to_json(&self) -> String {
        let confidence = match self.confidence {
            Confidence::Exact => serde_json::json!("exact"),
            Confidence::UpToSize(n) => serde_json::json!({ "up_to_size": n }),
        };
        serde_json::json!({
            "band": self.band.as_str(),
            "confidence": confidence,
            "evidence": self
                .evidence
                .iter()
                .map(|e| {
                    serde_json::json!({
                        "check": e.check,
                        "result": e.result,
                        "witness": e.witness,
                    })
                })
                .collect::<Vec<_>>(),
        })
        .to_string()
    }
}

/// The twelve benchmark classes whose presence as a subclass puts a proper
/// class into the polylog band: the eight one-sided monotone juxtapositions
/// plus the layered class, the block-rotation sum class, and their reverses.
pub const X_CLASS_SPECS: [&str; 12] = [
    "grid([inc,inc])",
    "grid([inc,dec])",
    "grid([dec,inc])",
    "grid([dec,dec])",
    "grid([inc],[inc])",
    "grid([inc],[dec])",
    "grid([dec],[inc])",
    "grid([dec],[dec])",
    "L",
    "rev(L)",
    "PBT",
    "rev(PBT)",
];

/// Default member-enumeration depth for the containment semi-decision; every
/// pairwise separation among the benchmark suite's classes shows up by this
/// size.
pub const DEFAULT_X_DEPTH: usize = 6;

#[derive(Clone, Debug)]
pub struct Containment {
    pub contained: bool,
    /// Whether the answer is a finite proof rather than a bounded-depth scan.
    pub exact: bool,
    pub witness: String,
}

/// Does the class contain one of the twelve benchmark classes as a subclass?
/// For avoidance-basis specs the test is exact: a benchmark class X lies
/// inside Av(B) exactly when no element of B is a member of X. Specs equal to
/// a benchmark class are exact as well. Otherwise X is declared contained
/// when every X-member of size at most `depth` belongs to the class; a
/// failing member refutes the containment exactly.
pub fn x_containment(c: &ClassHandle, depth: usize) -> Containment {
    let basis: Option<Vec<Perm>> = match (c.canonical(), c.spec()) {
        (ClassSpec::Av(b), _) => Some(b.clone()),
        (_, ClassSpec::Av(b)) => Some(b.clone()),
        _ => None,
    };
    let mut refutations = Vec::new();
    for spec in X_CLASS_SPECS {
        let x = ClassHandle::parse(spec).expect("benchmark specs parse");
        if c.canonical_string() == x.canonical_string() {
            return Containment {
                contained: true,
                exact: true,
                witness: format!("class equals {spec}"),
            };
        }
        if let Some(basis) = &basis {
            match basis.iter().find(|b| x.member(b)) {
                None => {
                    return Containment {
                        contained: true,
                        exact: true,
                        witness: format!("{spec} avoids every basis element"),
                    };
                }
                Some(b) => {
                    refutations.push(format!("{spec} contains basis element {b}"));
                    continue;
                }
            }
        }
        let mut failed = None;
        'scan: for m in 1..=depth {
            for q in x.level(m).iter() {
                if !c.member(q) {
                    failed = Some(q.clone());
                    break 'scan;
                }
            }
        }
        match failed {
            Some(q) => refutations.push(format!("{spec} member {q} is outside the class")),
            None => {
                return Containment {
                    contained: true,
                    exact: false,
                    witness: format!("{spec} contained up to size {depth}"),
                };
            }
        }
    }
    Containment {
        contained: false,
        exact: true,
        witness: refutations.join("; "),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SortFailure {
    pub n: usize,
    pub subgroup_order: u64,
}

#[derive(Clone, Debug)]
pub struct CannotSortCheck {
    /// First size whose closure misses part of the symmetric group, if any.
    pub failure: Option<SortFailure>,
    pub checked_to: usize,
    /// All members of the top three checked sizes are rotations or reversed
    /// rotations.
    pub rr_contained: bool,
    /// Smallest k <= 3 whose two-sided fringe class contains the top level.
    pub rfringe_contained: Option<usize>,
}

/// Scans can_sort_at over n = 2..=n_max. The first failure is an exact
/// unsortability certificate (a class failing at n fails at every larger
/// size). When every size passes, structural signals hinting at eventual
/// failure are reported instead.
pub fn cannot_sort_check(c: &ClassHandle, n_max: usize) -> Result<CannotSortCheck> {
    let opts = BfsOptions::default();
    for n in 2..=n_max {
        if !engine::can_sort_at(c, n, &opts)? {
            let order = engine::generated_subgroup_order(c, n, &opts)?;
            return Ok(CannotSortCheck {
                failure: Some(SortFailure {
                    n,
                    subgroup_order: order,
                }),
                checked_to: n_max,
                rr_contained: false,
                rfringe_contained: None,
            });
        }
    }
    let rr = ClassHandle::parse("RR").expect("RR parses");
    let low = n_max.saturating_sub(2).max(2);
    let rr_contained = (low..=n_max).all(|n| c.level(n).iter().all(|q| rr.member(q)));
    let mut rfringe_contained = None;
    for k in 1..=3 {
        let rf = ClassHandle::parse(&format!("rfringe({k})")).expect("rfringe parses");
        if c.level(n_max).iter().all(|q| rf.member(q)) {
            rfringe_contained = Some(k);
            break;
        }
    }
    Ok(CannotSortCheck {
        failure: None,
        checked_to: n_max,
        rr_contained,
        rfringe_contained,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RinTrend {
    BoundedSuspected,
    UnboundedSuspected,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct RinCheck {
    pub trend: RinTrend,
    /// rin_of_class for n = 3..=n_max.
    pub sequence: Vec<u32>,
    pub checked_to: usize,
}

/// Computes the class's rotational-insertion eccentricity for n = 3..=n_max
/// and reads the trend off the last three values: all equal suggests a
/// bounded sequence (quadratic band), net strict growth across the window
/// suggests an unbounded one (linear band). Growth is judged across the
/// window rather than pairwise because the sequences climb with parity
/// plateaus (a new layer or block only fits every other size).
pub fn rin_bounded_check(c: &ClassHandle, n_max: usize) -> Result<RinCheck> {
    let opts = BfsOptions::default();
    let mut sequence = Vec::new();
    for n in 3..=n_max {
        sequence.push(engine::rin_of_class(c, n, &opts)?);
    }
    let trend = if sequence.len() < 3 {
        RinTrend::Inconclusive
    } else {
        let k = sequence.len();
        let (a, b, z) = (sequence[k - 3], sequence[k - 2], sequence[k - 1]);
        if a == b && b == z {
            RinTrend::BoundedSuspected
        } else if a < z {
            RinTrend::UnboundedSuspected
        } else {
            RinTrend::Inconclusive
        }
    };
    Ok(RinCheck {
        trend,
        sequence,
        checked_to: n_max,
    })
}

fn factorial(n: usize) -> u64 {
    FACT[n]
}

/// The class misses some permutation of size at most 5. Exact for every
/// supported constructor at that size.
pub fn is_proper(c: &ClassHandle) -> bool {
    (1..=5).any(|m| c.level_size(m) < factorial(m))
}

/// Decision ladder: (1) a spec denoting all permutations sorts anything in
/// one step; (2) a closure failure at any size is an exact unsortability
/// proof; (3) a proper class containing a benchmark class lands in the
/// polylog band; (4) otherwise the rin trend separates linear from quadratic,
/// with an inconclusive trend reported as quadratic at bounded confidence.
pub fn classify(c: &ClassHandle, n_max: usize) -> Result<Verdict> {
    let mut evidence = Vec::new();

    if c.denotes_all() {
        evidence.push(Evidence::new(
            "denotes_all",
            "true",
            "one member per inverse suffices for n >= 2",
        ));
        return Ok(Verdict {
            band: Band::OneStep,
            confidence: Confidence::Exact,
            evidence,
        });
    }
    evidence.push(Evidence::new("denotes_all", "false", ""));

    let scan = cannot_sort_check(c, n_max)?;
    if let Some(f) = scan.failure {
        evidence.push(Evidence::new(
            "can_sort_at",
            format!("fails at n={}", f.n),
            format!(
                "closure reaches {} of {} permutations",
                f.subgroup_order,
                factorial(f.n)
            ),
        ));
        return Ok(Verdict {
            band: Band::CannotSort,
            confidence: Confidence::Exact,
            evidence,
        });
    }
    evidence.push(Evidence::new(
        "can_sort_at",
        format!("passes for n <= {}", scan.checked_to),
        format!(
            "rotation-level containment: {}, fringe containment: {}",
            scan.rr_contained,
            scan.rfringe_contained
                .map(|k| format!("k={k}"))
                .unwrap_or_else(|| "none".to_string()),
        ),
    ));

    if is_proper(c) {
        let cont = x_containment(c, DEFAULT_X_DEPTH);
        if cont.contained {
            evidence.push(Evidence::new(
                "x_containment",
                if cont.exact {
                    "true (exact)".to_string()
                } else {
                    format!("true (up to size {DEFAULT_X_DEPTH})")
                },
                cont.witness,
            ));
            return Ok(Verdict {
                band: Band::Polylog,
                confidence: if cont.exact {
                    Confidence::Exact
                } else {
                    Confidence::UpToSize(DEFAULT_X_DEPTH)
                },
                evidence,
            });
        }
        evidence.push(Evidence::new("x_containment", "false", cont.witness));
    } else {
        evidence.push(Evidence::new(
            "proper",
            "false",
            "every permutation of size <= 5 belongs to the class",
        ));
    }

    let rin = rin_bounded_check(c, n_max)?;
    let seq = format!("{:?}", rin.sequence);
    match rin.trend {
        RinTrend::UnboundedSuspected => {
            evidence.push(Evidence::new("rin_bounded", "unbounded suspected", seq));
            Ok(Verdict {
                band: Band::Linear,
                confidence: Confidence::UpToSize(n_max),
                evidence,
            })
        }
        RinTrend::BoundedSuspected => {
            evidence.push(Evidence::new("rin_bounded", "bounded suspected", seq));
            Ok(Verdict {
                band: Band::Quadratic,
                confidence: Confidence::UpToSize(n_max),
                evidence,
            })
        }
        RinTrend::Inconclusive => {
            evidence.push(Evidence::new("rin_bounded", "inconclusive", seq));
            Ok(Verdict {
                band: Band::Quadratic,
                confidence: Confidence::UpToSize(n_max),
                evidence,
            })
        }
    }
}
