//! Finite semifields given by multiplication tables: axioms, nuclei, the
//! semifield spread and the linear set `L(S)`.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf::FieldTower;
use crate::linalg;
use crate::linset::LinearSet;
use crate::reduction::ReductionContext;

/// A semifield on `F_p^m`. Element indices are base-`p` digit vectors
/// (`index = Σ d_i p^i`), so addition is digitwise mod `p`; `mul[x*N + y]`
/// is `x ∘ y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemifieldTable {
    p: u32,
    m: u32,
    mul: Vec<u32>,
}

impl SemifieldTable {
    pub fn new(p: u32, m: u32, mul: Vec<u32>) -> Result<Self> {
        if !crate::gf::is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        let n = (p as u64)
            .checked_pow(m)
            .filter(|&n| n <= 1 << 12)
            .ok_or(Error::FieldTooLarge((p as u64).saturating_pow(m)))? as usize;
        if mul.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: mul.len(),
            });
        }
        if let Some(&x) = mul.iter().find(|&&x| x as usize >= n) {
            return Err(Error::Parse(format!("table entry {x} out of range")));
        }
        Ok(SemifieldTable { p, m, mul })
    }

    /// The multiplication table of a field.
    pub fn from_field(tower: &FieldTower) -> Self {
        let n = tower.order();
        let mul = (0..n)
            .flat_map(|x| (0..n).map(move |y| tower.mul(x, y)))
            .collect();
        SemifieldTable {
            p: tower.p(),
            m: tower.h(),
            mul,
        }
    }

    /// `(a, b) ∘ (c, d) = (ac + j b^σ d^σ, ad + bc)` on `K^2`, `σ: x -> x^{p^s}`,
    /// `j` the least non-square of `K`; `(a, b)` has index `a + |K| b`.
    pub fn dickson(k: &FieldTower, s: u32) -> Result<Self> {
        if k.p() == 2 {
            return Err(Error::Precondition("Dickson semifields need odd characteristic".into()));
        }
        if s.is_multiple_of(k.h()) {
            return Err(Error::Precondition("σ must be nontrivial".into()));
        }
        let kn = k.order();
        let j = (1..kn)
            .find(|&x| !k.is_square(x).expect("nonzero"))
            .expect("odd order fields have non-squares");
        let n = kn * kn;
        let mut mul = vec![0u32; (n * n) as usize];
        for x in 0..n {
            let (a, b) = (x % kn, x / kn);
            for y in 0..n {
                let (c, d) = (y % kn, y / kn);
                let twist = k.mul(j, k.mul(k.frob(b, s), k.frob(d, s)));
                let first = k.add(k.mul(a, c), twist);
                let second = k.add(k.mul(a, d), k.mul(b, c));
                mul[(x * n + y) as usize] = first + kn * second;
            }
        }
        Self::new(k.p(), 2 * k.h(), mul)
    }

    /// Text format: `p m`, then `N` rows of `N` indices.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let head = lines.next().ok_or_else(|| Error::Parse("empty table".into()))?;
        let nums: Vec<u32> = head
            .split_whitespace()
            .map(|x| x.parse().map_err(|_| Error::Parse(format!("bad header '{head}'"))))
            .collect::<Result<_>>()?;
        let [p, m] = nums[..] else {
            return Err(Error::Parse(format!("header must be 'p m', got '{head}'")));
        };
        let mut mul = Vec::new();
        for line in lines {
            for tok in line.split_whitespace() {
                mul.push(tok.parse().map_err(|_| Error::Parse(format!("bad entry '{tok}'")))?);
            }
        }
        Self::new(p, m, mul)
    }

    pub fn to_text(&self) -> String {
        let n = self.order();
        let mut out = format!("{} {}\n", self.p, self.m);
        for x in 0..n {
            let row: Vec<String> = (0..n).map(|y| self.mul(x, y).to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn order(&self) -> u32 {
        self.p.pow(self.m)
    }

    #[inline]
    pub fn mul(&self, x: u32, y: u32) -> u32 {
        self.mul[(x * self.order() + y) as usize]
    }

    /// Overwrites one product; used to build counterexamples.
    pub fn set(&mut self, x: u32, y: u32, v: u32) {
        let n = self.order();
        self.mul[(x * n + y) as usize] = v;
    }

    pub fn add(&self, x: u32, y: u32) -> u32 {
        let p = self.p;
        let (mut x, mut y) = (x, y);
        let mut out = 0;
        let mut place = 1;
        while x > 0 || y > 0 {
            out += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        out
    }

    /// Digits of an element over `F_p`.
    pub fn digits(&self, x: u32) -> Vec<u32> {
        let mut x = x;
        (0..self.m)
            .map(|_| {
                let d = x % self.p;
                x /= self.p;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, d: &[u32]) -> u32 {
        d.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    /// `c·x` for `c ∈ F_p`.
    pub fn scalar(&self, c: u32, x: u32) -> u32 {
        let d: Vec<u32> = self.digits(x).iter().map(|&v| v * c % self.p).collect();
        self.from_digits(&d)
    }
}

/// A substructure given by its elements, with the result of the field test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substructure {
    pub elements: Vec<u32>,
    /// Closed under `+` and `∘`, commutative, with inverses of nonzero elements.
    pub is_field: bool,
}

impl Substructure {
    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nuclei {
    pub left: Substructure,
    pub middle: Substructure,
    pub right: Substructure,
    pub nucleus: Substructure,
    pub commutative_center: Substructure,
    pub center: Substructure,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemifieldReport {
    pub s1: bool,
    /// Both distributive laws.
    pub s2: bool,
    /// No zero divisors.
    pub s3: bool,
    /// Two-sided identity.
    pub s4: bool,
    /// `(x, y, z)` violating one of the distributive laws.
    pub distributivity_witness: Option<(u32, u32, u32)>,
    /// `(x, y)` with `x, y != 0`, `x ∘ y = 0`.
    pub zero_divisor: Option<(u32, u32)>,
    pub identity: Option<u32>,
    pub nuclei: Nuclei,
}

impl SemifieldReport {
    pub fn is_semifield(&self) -> bool {
        self.s1 && self.s2 && self.s3 && self.s4
    }

    /// Not associative, i.e. the nucleus is smaller than the whole.
    pub fn is_proper(&self, order: u32) -> bool {
        self.nuclei.nucleus.order() < order as usize
    }
}

fn field_test(tbl: &SemifieldTable, el: &[u32]) -> bool {
    let set: HashSet<u32> = el.iter().copied().collect();
    if !set.contains(&0) || !set.contains(&1) || !el.len().is_power_of_two() && tbl.p == 2 {
        return false;
    }
    let mut size = el.len() as u64;
    while size.is_multiple_of(tbl.p as u64) {
        size /= tbl.p as u64;
    }
    if size != 1 {
        return false;
    }
    for &a in el {
        for &b in el {
            if !set.contains(&tbl.add(a, b))
                || !set.contains(&tbl.mul(a, b))
                || tbl.mul(a, b) != tbl.mul(b, a)
            {
                return false;
            }
        }
        if a != 0 && !el.iter().any(|&b| tbl.mul(a, b) == 1) {
            return false;
        }
    }
    true
}

fn substructure(tbl: &SemifieldTable, el: Vec<u32>) -> Substructure {
    let is_field = field_test(tbl, &el);
    Substructure {
        elements: el,
        is_field,
    }
}

fn assoc(tbl: &SemifieldTable, x: u32, y: u32, z: u32) -> bool {
    tbl.mul(x, tbl.mul(y, z)) == tbl.mul(tbl.mul(x, y), z)
}

/// Checks (S1)-(S4) and computes the nuclei and centers exhaustively.
pub fn check_semifield(tbl: &SemifieldTable) -> SemifieldReport {
    let n = tbl.order();
    let distributivity_witness = (0..n).into_par_iter().find_map_first(|x| {
        for y in 0..n {
            for z in 0..n {
                let left = tbl.mul(x, tbl.add(y, z)) != tbl.add(tbl.mul(x, y), tbl.mul(x, z));
                let right = tbl.mul(tbl.add(x, y), z) != tbl.add(tbl.mul(x, z), tbl.mul(y, z));
                if left || right {
                    return Some((x, y, z));
                }
            }
        }
        None
    });
    let zero_divisor = (1..n)
        .flat_map(|x| (1..n).map(move |y| (x, y)))
        .find(|&(x, y)| tbl.mul(x, y) == 0);
    let identity = (1..n).find(|&e| (0..n).all(|x| tbl.mul(e, x) == x && tbl.mul(x, e) == x));

    let all = |pred: &(dyn Fn(u32, u32, u32) -> bool + Sync)| -> Vec<u32> {
        (0..n)
            .into_par_iter()
            .filter(|&a| (0..n).all(|b| (0..n).all(|c| pred(a, b, c))))
            .collect()
    };
    let left = all(&|x, y, z| assoc(tbl, x, y, z));
    let middle = all(&|y, x, z| assoc(tbl, x, y, z));
    let right = all(&|z, x, y| assoc(tbl, x, y, z));
    let nucleus: Vec<u32> = left
        .iter()
        .copied()
        .filter(|x| middle.binary_search(x).is_ok() && right.binary_search(x).is_ok())
        .collect();
    let commutative: Vec<u32> = (0..n)
        .filter(|&x| (0..n).all(|y| tbl.mul(x, y) == tbl.mul(y, x)))
        .collect();
    let center: Vec<u32> = nucleus
        .iter()
        .copied()
        .filter(|x| commutative.binary_search(x).is_ok())
        .collect();
    SemifieldReport {
        s1: true,
        s2: distributivity_witness.is_none(),
        s3: zero_divisor.is_none(),
        s4: identity.is_some(),
        distributivity_witness,
        zero_divisor,
        identity,
        nuclei: Nuclei {
            left: substructure(tbl, left),
            middle: substructure(tbl, middle),
            right: substructure(tbl, right),
            nucleus: substructure(tbl, nucleus),
            commutative_center: substructure(tbl, commutative),
            center: substructure(tbl, center),
        },
    }
}

/// The spread `{S_x} ∪ {S_∞}` of `S × S` together with `L(S)`.
#[derive(Clone, Debug)]
pub struct SemifieldSpreadSet {
    /// Components as sorted pair indices `y + N z` of `(y, z)`; `S_∞` last.
    pub components: Vec<Vec<u64>>,
    /// Every nonzero vector of `S × S` lies in exactly one component.
    pub partition: bool,
    pub closed_under_addition: bool,
    /// Every `R_x`, `x != 0`, is an invertible endomorphism of `V_l(S)`.
    pub invertible: bool,
    /// Order of the subfield of the left nucleus used as scalars.
    pub scalar_order: u32,
    /// Dimension of `S` over the scalars.
    pub l: usize,
    /// `L(S)` in PG(l^2 - 1, |scalars|), of rank `m` over `F_p`.
    pub linear_set: LinearSet,
}

/// Identifies a subfield `K` of the left nucleus with a field tower via the
/// minimal polynomial of a primitive element.
struct ScalarField {
    tower: FieldTower,
    /// Semifield index -> tower code, for elements of `K`.
    to_tower: Vec<Option<u32>>,
    elements: Vec<u32>,
}

fn scalar_field(tbl: &SemifieldTable, nucleus: &[u32], order: u32) -> Result<ScalarField> {
    let p = tbl.p();
    let d = (1..=tbl.m())
        .find(|&d| p.pow(d) == order)
        .ok_or_else(|| Error::Precondition(format!("{order} is not a power of {p}")))?;
    // K = { x ∈ N_l : x^{order} = x }.
    let power = |x: u32, e: u64| -> u32 {
        let mut acc = 1;
        for _ in 0..e {
            acc = tbl.mul(acc, x);
        }
        acc
    };
    let elements: Vec<u32> = nucleus
        .iter()
        .copied()
        .filter(|&x| power(x, order as u64) == x)
        .collect();
    if elements.len() != order as usize {
        return Err(Error::Precondition(format!(
            "left nucleus has no subfield of order {order}"
        )));
    }
    let fp = FieldTower::new(p, 1, None)?;
    let primitive = |z: u32| {
        let mut acc = z;
        for k in 1..order - 1 {
            if acc == 1 {
                return k == order - 1;
            }
            acc = tbl.mul(acc, z);
        }
        acc == 1
    };
    let (tower, z) = if d == 1 {
        let t = fp.clone();
        (t.clone(), tbl.scalar(t.generator(), 1))
    } else {
        let z = *elements[1..]
            .iter()
            .find(|&&z| primitive(z))
            .ok_or_else(|| Error::Invariant("subfield has no primitive element".into()))?;
        let pows: Vec<Vec<u32>> = (0..d).map(|i| tbl.digits(power(z, i as u64))).collect();
        let target = tbl.digits(power(z, d as u64));
        let c = linalg::combination(&fp, &pows, &target)
            .ok_or_else(|| Error::Invariant("powers of a primitive element are dependent".into()))?;
        let mut modulus: Vec<u32> = c.iter().map(|&x| fp.neg(x)).collect();
        modulus.push(1);
        (FieldTower::new(p, d, Some(&modulus))?, z)
    };
    let mut to_tower = vec![None; tbl.order() as usize];
    to_tower[0] = Some(0);
    let mut acc = 1;
    for k in 0..order as u64 - 1 {
        to_tower[acc as usize] = Some(tower.exp(k));
        acc = tbl.mul(acc, z);
    }
    Ok(ScalarField {
        tower,
        to_tower,
        elements,
    })
}

/// Builds the spread `{S_x} ∪ {S_∞}`, the spread set `R_x` as matrices over a
/// subfield `K` of the left nucleus (all of it by default), and `L(S)`.
pub fn semifield_spread(tbl: &SemifieldTable, scalar_order: Option<u32>) -> Result<SemifieldSpreadSet> {
    let report = check_semifield(tbl);
    if !report.is_semifield() {
        return Err(Error::Precondition("table fails the semifield axioms".into()));
    }
    if report.identity != Some(1) {
        return Err(Error::Precondition("identity must have index 1".into()));
    }
    let n = tbl.order();
    let nn = n as u64;
    let mut components: Vec<Vec<u64>> = (0..n)
        .map(|x| {
            let mut c: Vec<u64> = (0..n).map(|y| y as u64 + nn * tbl.mul(y, x) as u64).collect();
            c.sort();
            c
        })
        .collect();
    components.push((0..nn).map(|y| nn * y).collect());
    let mut seen = vec![0u8; (nn * nn) as usize];
    for c in &components {
        for &v in c {
            seen[v as usize] = seen[v as usize].saturating_add(1);
        }
    }
    let partition = seen[0] as usize == components.len() && seen[1..].iter().all(|&c| c == 1);
    let closed_under_addition = (0..n).into_par_iter().all(|x| {
        (0..n).all(|y1| {
            (0..n).all(|y2| tbl.mul(tbl.add(y1, y2), x) == tbl.add(tbl.mul(y1, x), tbl.mul(y2, x)))
        })
    });

    let order = scalar_order.unwrap_or(report.nuclei.left.order() as u32);
    let k = scalar_field(tbl, &report.nuclei.left.elements, order)?;
    let kt = &k.tower;
    // Basis of V_l(S) over K (scalars act on the left), and coordinates.
    let mut basis: Vec<u32> = Vec::new();
    let mut span: HashSet<u32> = HashSet::from([0]);
    for v in 0..n {
        if span.contains(&v) {
            continue;
        }
        basis.push(v);
        let mut next = HashSet::new();
        for &s in &span {
            for &a in &k.elements {
                next.insert(tbl.add(s, tbl.mul(a, v)));
            }
        }
        span = next;
        if span.len() == n as usize {
            break;
        }
    }
    let l = basis.len();
    let mut coords: Vec<Vec<u32>> = vec![Vec::new(); n as usize];
    let mut combo = vec![0usize; l];
    loop {
        let mut v = 0;
        for (i, &c) in combo.iter().enumerate() {
            v = tbl.add(v, tbl.mul(k.elements[c], basis[i]));
        }
        coords[v as usize] = combo.iter().map(|&c| k.to_tower[k.elements[c] as usize].expect("in K")).collect();
        let mut i = 0;
        while i < l && combo[i] + 1 == k.elements.len() {
            combo[i] = 0;
            i += 1;
        }
        if i == l {
            break;
        }
        combo[i] += 1;
    }
    // R_x as an l x l matrix: row i holds the coordinates of b_i ∘ x.
    let matrix_of = |x: u32| -> Vec<Vec<u32>> {
        basis.iter().map(|&b| coords[tbl.mul(b, x) as usize].clone()).collect()
    };
    let invertible = (1..n).all(|x| linalg::determinant(kt, &matrix_of(x)) != 0);

    let ctx = ReductionContext::with_tower(kt, l * l, 1)?;
    let gens: Vec<Vec<u32>> = (0..tbl.m())
        .map(|i| {
            let x = tbl.p().pow(i);
            matrix_of(x).into_iter().flatten().collect()
        })
        .collect();
    let linear_set = LinearSet::from_vectors(&ctx, &gens)?;
    if linear_set.rank() != tbl.m() as usize {
        return Err(Error::Invariant(format!(
            "spread set has F_p-rank {} instead of {}",
            linear_set.rank(),
            tbl.m()
        )));
    }
    Ok(SemifieldSpreadSet {
        components,
        partition,
        closed_under_addition,
        invertible,
        scalar_order: order,
        l,
        linear_set,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf4_is_a_field() {
        let t = FieldTower::of_order(4).unwrap();
        let tbl = SemifieldTable::from_field(&t);
        let r = check_semifield(&tbl);
        assert!(r.is_semifield());
        assert_eq!(r.nuclei.left.order(), 4);
        assert_eq!(r.nuclei.center.order(), 4);
        assert!(!r.is_proper(4));
        let sp = semifield_spread(&tbl, None).unwrap();
        assert_eq!(sp.components.len(), 5);
        assert!(sp.partition);
        assert_eq!(sp.linear_set.len(), 1);
        assert_eq!(sp.linear_set.points()[0].weight, 2);
    }

    #[test]
    fn zero_divisor_is_reported() {
        let t = FieldTower::of_order(4).unwrap();
        let mut tbl = SemifieldTable::from_field(&t);
        tbl.set(2, 3, 0);
        let r = check_semifield(&tbl);
        assert_eq!(r.zero_divisor, Some((2, 3)));
        assert!(!r.s3);
        assert!(semifield_spread(&tbl, None).is_err());
    }

    #[test]
    fn text_round_trip() {
        let t = FieldTower::of_order(3).unwrap();
        let tbl = SemifieldTable::from_field(&t);
        assert_eq!(tbl.to_text(), "3 1\n0 0 0\n0 1 2\n0 2 1\n");
        assert_eq!(SemifieldTable::parse(&tbl.to_text()).unwrap(), tbl);
        assert!(SemifieldTable::parse("3 1\n0 0").is_err());
    }
}
