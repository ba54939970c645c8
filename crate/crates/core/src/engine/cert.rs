use std::fmt;
use std::sync::Arc;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::Automorphism;
use crate::error::{Error, Result};
use crate::order::rational::{floor_int, fmt_rational, int, Rational};
use crate::order::Point;

/// Sampled evidence that `‖g - id‖ <= radius`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub subject: String,
    #[serde(default)]
    pub subject_id: u64,
    pub radius: String,
    pub provenance: String,
    pub samples: usize,
}

/// Sampled evidence that the subject fixes every tested point outside `region`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SupportCertificate {
    pub subject: String,
    #[serde(default)]
    pub subject_id: u64,
    pub region: String,
    pub provenance: String,
    pub samples: usize,
}

/// Region outside of which an automorphism is claimed to be the identity.
#[derive(Clone)]
pub struct Region {
    pub description: String,
    inside: Arc<dyn Fn(&Point) -> bool + Send + Sync>,
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Region({})", self.description)
    }
}

impl Region {
    pub fn new(description: impl Into<String>, inside: impl Fn(&Point) -> bool + Send + Sync + 'static) -> Self {
        Region { description: description.into(), inside: Arc::new(inside) }
    }

    pub fn contains(&self, p: &Point) -> bool {
        (self.inside)(p)
    }

    /// Q minus the lattice `modulus*Z + offset`: support region of `Stab(modulus*Z + offset)`.
    pub fn off_lattice(modulus: i64, offset: i64) -> Region {
        Region::new(format!("Q \\ ({modulus}Z+{offset})"), move |p| match p {
            Point::Q(x) => {
                let t = (x - int(offset)) / int(modulus);
                !crate::order::rational::is_integer(&t)
            }
            _ => true,
        })
    }

    /// Union of the closed windows `[n*j + lo, n*j + hi]`.
    pub fn periodic_closed(modulus: i64, lo: i64, hi: i64) -> Region {
        Region::new(format!("U[{modulus}j+{lo}, {modulus}j+{hi}]"), move |p| match p {
            Point::Q(x) => {
                let j = floor_int(&((x - int(lo)) / int(modulus)));
                let start = Rational::from_integer(j) * int(modulus) + int(lo);
                x <= &(start + int(hi - lo))
            }
            _ => true,
        })
    }

    /// Complement of `I_n`, the support region of `Stab(I_n)`.
    pub fn outside_i(n: i64) -> Region {
        let mut r = Region::periodic_closed(n, 0, 2);
        r.description = format!("Q \\ I_{n}");
        r
    }
}

/// Checks `|(x)g - x| <= r` at each sample; the first violation is the witness.
pub fn certify_bound(g: &Automorphism, r: &Rational, samples: &[Rational], provenance: &str) -> Result<BoundCertificate> {
    for x in samples {
        let y = g.apply_q(x)?;
        if (&y - x).abs() > *r {
            return Err(Error::Certificate {
                claim: format!("{} in B_{}", g.describe(), fmt_rational(r)),
                witness: fmt_rational(x),
            });
        }
    }
    Ok(BoundCertificate {
        subject: g.describe(),
        subject_id: g.id(),
        radius: fmt_rational(r),
        provenance: provenance.to_string(),
        samples: samples.len(),
    })
}

/// Checks that every sample outside `region` is fixed.
pub fn certify_support(g: &Automorphism, region: &Region, samples: &[Point], provenance: &str) -> Result<SupportCertificate> {
    let mut tested = 0;
    for x in samples {
        if region.contains(x) {
            continue;
        }
        tested += 1;
        let y = g.forward(x)?;
        if &y != x {
            return Err(Error::Certificate {
                claim: format!("supp({}) within {}", g.describe(), region.description),
                witness: x.to_string(),
            });
        }
    }
    Ok(SupportCertificate {
        subject: g.describe(),
        subject_id: g.id(),
        region: region.description.clone(),
        provenance: provenance.to_string(),
        samples: tested,
    })
}
