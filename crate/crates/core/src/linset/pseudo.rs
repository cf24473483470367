//! Maximum scattered linear sets `L_{ρ,f}` and their pseudoreguli.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::projspace::{self, ProjSubspace};
use crate::reduction::ReductionContext;

use super::LinearSet;

/// `L_{ρ,f}` together with the lines `<P, P^{Φ_f}>`, `P ∈ T1`.
#[derive(Clone, Debug)]
pub struct LRhoF {
    pub linear_set: LinearSet,
    pub lines: Vec<ProjSubspace>,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Builds `L_{ρ,f} = { <u + ρ f(u)> : u ∈ U1 \ {0} }` in PG(2r-1, q^t), where
/// `f(x T1) = x^σ F T2` in the row bases of `T1` and `T2`, `σ: x -> x^{p^s}`.
///
/// The result is checked to be scattered of rank `rt`, to be disjoint from
/// `T1` and `T2`, and to meet each line `<P, P^{Φ_f}>` in `(q^t-1)/(q-1)`
/// points, these lines being pairwise disjoint.
pub fn build_l_rho_f(
    ctx: &ReductionContext,
    t1: &ProjSubspace,
    t2: &ProjSubspace,
    s: u32,
    f_matrix: Option<&Matrix>,
    rho: u32,
) -> Result<LRhoF> {
    let f = ctx.tower();
    let n = ctx.r();
    if !n.is_multiple_of(2) || n < 2 {
        return Err(Error::Precondition("ambient space must be PG(2r-1, q^t)".into()));
    }
    let r = n / 2;
    if t1.ambient_n() != n || t2.ambient_n() != n || t1.rank() != r || t2.rank() != r {
        return Err(Error::Precondition(format!(
            "T1 and T2 must be ({})-spaces of PG({}, q^t)",
            r as isize - 1,
            n - 1
        )));
    }
    if !t1.meet(t2)?.is_empty() {
        return Err(Error::Precondition("T1 and T2 are not disjoint".into()));
    }
    if gcd(s % f.h(), f.h()) != ctx.small_degree() {
        return Err(Error::Precondition(format!(
            "x -> x^(p^{s}) does not have fixed field F_{}",
            ctx.q()
        )));
    }
    if rho == 0 {
        return Err(Error::Precondition("rho must be nonzero".into()));
    }
    let id = linalg::identity(r);
    let fm = f_matrix.unwrap_or(&id);
    if fm.len() != r || linalg::determinant(f, fm) == 0 {
        return Err(Error::Singular);
    }
    let image_rows = linalg::mat_mul(f, fm, t2.rows());
    let mut gens = Vec::with_capacity(r * ctx.t());
    for i in 0..r {
        for &b in ctx.basis().basis() {
            let u = linalg::scale(f, &t1.rows()[i], b);
            let fu = linalg::scale(f, &image_rows[i], f.mul(rho, f.frob(b, s)));
            gens.push(linalg::add_vec(f, &u, &fu));
        }
    }
    let l = LinearSet::from_vectors(ctx, &gens)?;
    if l.rank() != r * ctx.t() || !l.is_scattered() {
        return Err(Error::Invariant(format!(
            "L_rho_f has rank {} and is {}scattered",
            l.rank(),
            if l.is_scattered() { "" } else { "not " }
        )));
    }
    let members: HashSet<Vec<u32>> = l.point_set().into_iter().collect();
    for t in [t1, t2] {
        let mut hit = false;
        t.for_each_point(|v| hit |= members.contains(v));
        if hit {
            return Err(Error::Invariant("a transversal space meets L_rho_f".into()));
        }
    }
    let q = ctx.q() as u64;
    let expected = ((q.pow(ctx.t() as u32) - 1) / (q - 1)) as usize;
    let mut lines = BTreeSet::new();
    let local = ProjSubspace::whole(ctx.big(), r);
    let mut err = None;
    local.for_each_point(|x| {
        let p = linalg::vec_mat(f, x, t1.rows());
        let xs: Vec<u32> = x.iter().map(|&c| f.frob(c, s)).collect();
        let pf = linalg::vec_mat(f, &xs, &image_rows);
        let line = ProjSubspace::canonical(ctx.big(), n, &[p, pf]).expect("same length");
        let mut cnt = 0;
        line.for_each_point(|v| cnt += members.contains(v) as usize);
        if cnt != expected {
            err.get_or_insert(Error::Invariant(format!(
                "line {line:?} meets L_rho_f in {cnt} points"
            )));
        }
        lines.insert(line);
    });
    if let Some(e) = err {
        return Err(e);
    }
    let lines: Vec<ProjSubspace> = lines.into_iter().collect();
    let mut owner: HashMap<Vec<u32>, usize> = HashMap::new();
    for (i, line) in lines.iter().enumerate() {
        let mut clash = false;
        line.for_each_point(|v| clash |= owner.insert(v.to_vec(), i).is_some());
        if clash {
            return Err(Error::Invariant("pseudoregulus lines are not disjoint".into()));
        }
    }
    Ok(LRhoF {
        linear_set: l,
        lines,
    })
}

/// The `(q^2+q+1)`-secant lines and transversal spaces of a maximum scattered
/// linear set of PG(2r-1, q^3), found by exhaustive sweeps.
#[derive(Clone, Debug)]
pub struct Pseudoregulus {
    pub secants: Vec<ProjSubspace>,
    /// (r-1)-spaces disjoint from `L` meeting every secant.
    pub transversals: Vec<ProjSubspace>,
    /// Sizes of `ℓ ∩ L` over all lines `ℓ`.
    pub spectrum: BTreeSet<usize>,
    /// `(q^{3r} - 1)/(q^3 - 1)`.
    pub expected_secants: usize,
    pub secants_disjoint: bool,
    pub one_secant_per_point: bool,
}

impl Pseudoregulus {
    pub fn verified(&self, q: usize) -> bool {
        let allowed: BTreeSet<usize> = [0, 1, q + 1, q * q + q + 1].into();
        self.secants.len() == self.expected_secants
            && self.secants_disjoint
            && self.one_secant_per_point
            && self.transversals.len() == 2
            && self.spectrum.is_subset(&allowed)
    }
}

pub fn pseudoregulus_of(l: &LinearSet, budget: u128) -> Result<Pseudoregulus> {
    let ctx = l.ctx();
    let n = ctx.r();
    if ctx.t() != 3 {
        return Err(Error::Precondition("pseudoreguli are defined for t = 3".into()));
    }
    if !n.is_multiple_of(2) || n < 4 {
        return Err(Error::Precondition("ambient space must be PG(2r-1, q^3), r >= 2".into()));
    }
    let r = n / 2;
    if !l.is_scattered() || l.rank() != 3 * r {
        return Err(Error::Precondition("linear set is not maximum scattered".into()));
    }
    let q = ctx.q() as usize;
    let long = q * q + q + 1;
    let members: HashSet<Vec<u32>> = l.point_set().into_iter().collect();
    let lines = projspace::enumerate(ctx.big(), n, 1, budget)?;
    let mut spectrum = BTreeSet::new();
    let mut secants = Vec::new();
    for line in &lines {
        let mut cnt = 0;
        line.for_each_point(|v| cnt += members.contains(v) as usize);
        spectrum.insert(cnt);
        if cnt == long {
            secants.push(line.clone());
        }
    }
    let mut cover: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut secants_disjoint = true;
    for s in &secants {
        s.for_each_point(|v| {
            let c = cover.entry(v.to_vec()).or_default();
            *c += 1;
            if *c > 1 {
                secants_disjoint = false;
            }
        });
    }
    let one_secant_per_point = members
        .iter()
        .all(|p| secants.iter().filter(|s| s.contains_vector(p)).count() == 1);

    let candidates = if r == 2 {
        lines
    } else {
        projspace::enumerate(ctx.big(), n, r - 1, budget)?
    };
    let mut transversals = Vec::new();
    for c in candidates {
        if !secants.iter().all(|s| c.span(s).is_ok_and(|sp| sp.rank() < r + 2)) {
            continue;
        }
        let mut hit = false;
        c.for_each_point(|v| hit |= members.contains(v));
        if !hit {
            transversals.push(c);
        }
    }
    let qq = ctx.q() as u64;
    let expected = ((qq.pow(3 * r as u32) - 1) / (qq.pow(3) - 1)) as usize;
    Ok(Pseudoregulus {
        secants,
        transversals,
        spectrum,
        expected_secants: expected,
        secants_disjoint,
        one_secant_per_point,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_wrong_automorphism() {
        // F_16 over F_2 with σ = x^4 fixes F_4
        let ctx = ReductionContext::new(4, 4, 2).unwrap();
        let big = ctx.big();
        let t1 = ProjSubspace::canonical(big, 4, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0]]).unwrap();
        let t2 = ProjSubspace::canonical(big, 4, &[vec![0, 0, 1, 0], vec![0, 0, 0, 1]]).unwrap();
        assert!(build_l_rho_f(&ctx, &t1, &t2, 2, None, 1).is_err());
        assert!(build_l_rho_f(&ctx, &t1, &t2, 1, None, 0).is_err());
    }
}
