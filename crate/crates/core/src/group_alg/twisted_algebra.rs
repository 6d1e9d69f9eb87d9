//! The algebra `A_alpha(G, S)` with basis `a (x) e(M)`, `a in G`, `M in S`,
//! and product `(a (x) e(M))(b (x) e(N)) = alpha_N(a,b) ab (x) e(M.b) e(N)`.

use num_complex::Complex64;
use serde::Serialize;

use super::cocycle::root_of_unity;
use super::group::FiniteGroup;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistedModuleAlgebraSpec {
    pub group: FiniteGroup,
    pub labels: Vec<String>,
    /// `action[g][M]` is the index of `M . g`; a right action.
    pub action: Vec<Vec<usize>>,
    /// Root order for the cocycle family.
    pub n: u32,
    /// `alpha[N][a][b]` is the exponent of `alpha_N(a, b)`.
    pub alpha: Vec<Vec<Vec<u32>>>,
}

/// `exp(2 pi i coeff_exp / n) * (elem (x) e(label))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScaledBasis {
    pub coeff_exp: u32,
    pub elem: usize,
    pub label: usize,
}

impl TwistedModuleAlgebraSpec {
    pub fn new(
        group: FiniteGroup,
        labels: Vec<String>,
        action: Vec<Vec<usize>>,
        n: u32,
        alpha: Vec<Vec<Vec<u32>>>,
    ) -> Result<Self> {
        let m = group.order();
        let s = labels.len();
        if n == 0 {
            return Err(Error::Structural("cocycle root order must be positive".into()));
        }
        if action.len() != m {
            return Err(Error::Structural(format!(
                "action has {} rows for {m} group elements",
                action.len()
            )));
        }
        for (g, row) in action.iter().enumerate() {
            let mut seen = vec![false; s];
            if row.len() != s || row.iter().any(|&x| x >= s || std::mem::replace(&mut seen[x], true)) {
                return Err(Error::Structural(format!("action of element {g} is not a permutation")));
            }
        }
        if action[0].iter().enumerate().any(|(i, &x)| i != x) {
            return Err(Error::Structural("identity does not act trivially".into()));
        }
        for a in group.elements() {
            for b in group.elements() {
                let ab = group.mul(a, b);
                if (0..s).any(|x| action[b][action[a][x]] != action[ab][x]) {
                    return Err(Error::Structural(format!("not a right action at ({a}, {b})")));
                }
            }
        }
        if alpha.len() != s || alpha.iter().any(|t| t.len() != m || t.iter().any(|r| r.len() != m)) {
            return Err(Error::Structural("cocycle family has the wrong shape".into()));
        }
        let alpha = alpha
            .into_iter()
            .map(|t| t.into_iter().map(|r| r.into_iter().map(|x| x % n).collect()).collect())
            .collect();
        Ok(TwistedModuleAlgebraSpec {
            group,
            labels,
            action,
            n,
            alpha,
        })
    }

    /// Trivial cocycles on every label.
    pub fn untwisted(group: FiniteGroup, labels: Vec<String>, action: Vec<Vec<usize>>) -> Result<Self> {
        let m = group.order();
        let alpha = vec![vec![vec![0; m]; m]; labels.len()];
        Self::new(group, labels, action, 1, alpha)
    }

    pub fn dim(&self) -> usize {
        self.group.order() * self.labels.len()
    }

    pub fn act(&self, label: usize, g: usize) -> usize {
        self.action[g][label]
    }

    pub fn stabilizer(&self, label: usize) -> Vec<usize> {
        self.group.elements().filter(|&g| self.act(label, g) == label).collect()
    }

    pub fn orbit(&self, label: usize) -> Vec<usize> {
        let mut o: Vec<usize> = self.group.elements().map(|g| self.act(label, g)).collect();
        o.sort_unstable();
        o.dedup();
        o
    }

    /// `[G : G_M] * dim W`.
    pub fn induced_dimension(&self, label: usize, dim_w: usize) -> usize {
        self.group.order() / self.stabilizer(label).len() * dim_w
    }

    pub fn multiply(&self, (a, m): (usize, usize), (b, nn): (usize, usize)) -> Option<ScaledBasis> {
        a_alpha_multiply(self, (a, m), (b, nn))
    }

    /// First basis triple on which the product is not associative.
    pub fn associativity_failure(&self) -> Option<[(usize, usize); 3]> {
        let basis: Vec<(usize, usize)> = self
            .group
            .elements()
            .flat_map(|a| (0..self.labels.len()).map(move |m| (a, m)))
            .collect();
        let n = self.n;
        let times = |x: Option<ScaledBasis>, y: (usize, usize), left: bool| -> Option<ScaledBasis> {
            let x = x?;
            let p = if left {
                self.multiply((x.elem, x.label), y)?
            } else {
                self.multiply(y, (x.elem, x.label))?
            };
            Some(ScaledBasis {
                coeff_exp: (p.coeff_exp + x.coeff_exp) % n,
                ..p
            })
        };
        for &x in &basis {
            for &y in &basis {
                let xy = self.multiply(x, y);
                for &z in &basis {
                    let lhs = times(xy, z, true);
                    let rhs = times(self.multiply(y, z), x, false);
                    if lhs != rhs {
                        return Some([x, y, z]);
                    }
                }
            }
        }
        None
    }
}

pub fn a_alpha_multiply(
    spec: &TwistedModuleAlgebraSpec,
    (a, m): (usize, usize),
    (b, nn): (usize, usize),
) -> Option<ScaledBasis> {
    (spec.act(m, b) == nn).then(|| ScaledBasis {
        coeff_exp: spec.alpha[nn][a][b],
        elem: spec.group.mul(a, b),
        label: nn,
    })
}

impl ScaledBasis {
    pub fn coefficient(&self, n: u32) -> Complex64 {
        root_of_unity(self.coeff_exp as i64, n as i64)
    }
}
