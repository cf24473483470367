//! Quadratic and sesquilinear forms, their polar spaces, and the reduction of
//! a form over `F_{q^t}` to one over `F_q` through `L_α(x) = Tr(αx)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf::Field;
use crate::linalg::{self, Matrix};
use crate::projspace::{self, ProjSubspace};
use crate::reduction::ReductionContext;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormKind {
    /// `Q(x) = Σ_{i<=j} a_ij x_i x_j`, stored upper triangular.
    Quadratic,
    /// Symmetric bilinear.
    Symmetric,
    Alternating,
    /// σ-hermitian with σ the involution of the field.
    Hermitian,
    /// Symmetric bilinear in even characteristic with a nonzero diagonal.
    PseudoSymplectic,
    /// Any σ-sesquilinear form `x A (y^σ)^T`.
    Sesquilinear,
}

impl FormKind {
    pub fn name(self) -> &'static str {
        match self {
            FormKind::Quadratic => "quadratic",
            FormKind::Symmetric => "symmetric",
            FormKind::Alternating => "alternating",
            FormKind::Hermitian => "hermitian",
            FormKind::PseudoSymplectic => "pseudo-symplectic",
            FormKind::Sesquilinear => "sesquilinear",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "quadratic" => FormKind::Quadratic,
            "symmetric" | "bilinear-symmetric" => FormKind::Symmetric,
            "alternating" => FormKind::Alternating,
            "hermitian" => FormKind::Hermitian,
            "pseudo-symplectic" => FormKind::PseudoSymplectic,
            "sesquilinear" => FormKind::Sesquilinear,
            _ => return Err(Error::Parse(format!("unknown form kind '{s}'"))),
        })
    }
}

/// A form on `F^n`. For sesquilinear kinds `σ: x -> x^{p^s}`.
#[derive(Clone, Debug)]
pub struct FormSpec {
    field: Field,
    kind: FormKind,
    matrix: Matrix,
    s: u32,
    /// Matrix of `β`, the polarization for quadratic forms.
    polar: Matrix,
}

fn transpose_is(m: &Matrix, pred: impl Fn(u32, u32) -> bool) -> bool {
    let n = m.len();
    (0..n).all(|i| (0..n).all(|j| pred(m[j][i], m[i][j])))
}

impl FormSpec {
    pub fn new(field: &Field, kind: FormKind, matrix: Matrix, s: u32) -> Result<Self> {
        let n = matrix.len();
        if n == 0 {
            return Err(Error::Precondition("form on a zero-dimensional space".into()));
        }
        if let Some(r) = matrix.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: r.len(),
            });
        }
        if let Some(&x) = matrix.iter().flatten().find(|&&x| !field.contains(x)) {
            return Err(Error::NotInSubfield(x));
        }
        let d = field.degree();
        let s = s % d;
        let f = field;
        let bad = |msg: &str| Err(Error::Precondition(format!("not {}: {msg}", kind.name())));
        match kind {
            FormKind::Quadratic => {
                if (0..n).any(|i| (0..i).any(|j| matrix[i][j] != 0)) {
                    return bad("coefficients must be upper triangular");
                }
            }
            FormKind::Symmetric | FormKind::PseudoSymplectic | FormKind::Alternating if s != 0 => {
                return bad("bilinear forms have σ = 1");
            }
            FormKind::Symmetric => {
                if !transpose_is(&matrix, |a, b| a == b) {
                    return bad("matrix is not symmetric");
                }
            }
            FormKind::PseudoSymplectic => {
                if f.p() != 2 || !transpose_is(&matrix, |a, b| a == b) {
                    return bad("needs a symmetric matrix in even characteristic");
                }
                if (0..n).all(|i| matrix[i][i] == 0) {
                    return bad("diagonal is zero");
                }
            }
            FormKind::Alternating => {
                if !transpose_is(&matrix, |a, b| a == f.neg(b)) || (0..n).any(|i| matrix[i][i] != 0)
                {
                    return bad("matrix is not skew with zero diagonal");
                }
            }
            FormKind::Hermitian => {
                if !d.is_multiple_of(2) || 2 * s != d {
                    return bad("σ must be the involution x -> x^sqrt(|F|)");
                }
                if !transpose_is(&matrix, |a, b| a == f.frob(b, s)) {
                    return bad("matrix is not σ-hermitian");
                }
            }
            FormKind::Sesquilinear => {}
        }
        let s = if kind == FormKind::Quadratic { 0 } else { s };
        let polar = if kind == FormKind::Quadratic {
            let mut b = vec![vec![0; n]; n];
            for i in 0..n {
                b[i][i] = f.add(matrix[i][i], matrix[i][i]);
                for j in i + 1..n {
                    b[i][j] = matrix[i][j];
                    b[j][i] = matrix[i][j];
                }
            }
            b
        } else {
            matrix.clone()
        };
        Ok(FormSpec {
            field: field.clone(),
            kind,
            matrix,
            s,
            polar,
        })
    }

    /// A form from a flat coefficient list: the upper triangle row by row for
    /// quadratic forms, the full matrix row by row otherwise.
    pub fn from_coefficients(field: &Field, kind: FormKind, coeffs: &[u32], s: u32) -> Result<Self> {
        let len = coeffs.len();
        let n = if kind == FormKind::Quadratic {
            let n = ((((8 * len + 1) as f64).sqrt() - 1.0) / 2.0).round() as usize;
            if n * (n + 1) / 2 != len {
                return Err(Error::Parse(format!("{len} is not a triangular number")));
            }
            n
        } else {
            let n = (len as f64).sqrt().round() as usize;
            if n * n != len {
                return Err(Error::Parse(format!("{len} is not a square")));
            }
            n
        };
        let mut m = vec![vec![0; n]; n];
        let mut it = coeffs.iter();
        for (i, row) in m.iter_mut().enumerate() {
            let start = if kind == FormKind::Quadratic { i } else { 0 };
            for x in row.iter_mut().skip(start) {
                *x = *it.next().expect("length checked");
            }
        }
        Self::new(field, kind, m, s)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn kind(&self) -> FormKind {
        self.kind
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// Exponent `s` of the companion automorphism `x -> x^{p^s}`.
    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn n(&self) -> usize {
        self.matrix.len()
    }

    pub fn is_quadratic(&self) -> bool {
        self.kind == FormKind::Quadratic
    }

    /// `Q(x)` for quadratic forms, `β(x, x)` otherwise.
    pub fn value(&self, x: &[u32]) -> u32 {
        let f = &self.field;
        if self.is_quadratic() {
            let mut acc = 0;
            for (i, row) in self.matrix.iter().enumerate() {
                if x[i] == 0 {
                    continue;
                }
                let mut inner = 0;
                for j in i..row.len() {
                    if row[j] != 0 && x[j] != 0 {
                        inner = f.add(inner, f.mul(row[j], x[j]));
                    }
                }
                acc = f.add(acc, f.mul(x[i], inner));
            }
            acc
        } else {
            self.beta(x, x)
        }
    }

    /// The sesquilinear form, or the polarization `Q(x+y) - Q(x) - Q(y)`.
    pub fn beta(&self, x: &[u32], y: &[u32]) -> u32 {
        let f = &self.field;
        let mut acc = 0;
        for (i, row) in self.polar.iter().enumerate() {
            if x[i] == 0 {
                continue;
            }
            for (j, &a) in row.iter().enumerate() {
                if a != 0 && y[j] != 0 {
                    let yj = f.frob(y[j], self.s);
                    acc = f.add(acc, f.mul(f.mul(x[i], a), yj));
                }
            }
        }
        acc
    }

    /// Matrix of [`FormSpec::beta`].
    pub fn gram(&self) -> &Matrix {
        &self.polar
    }

    /// Human-readable polynomial or matrix rendering.
    pub fn to_text(&self) -> String {
        let t = self.field.tower();
        let entry = |x: u32| projspace::format_entry(t, x);
        if self.is_quadratic() {
            let mut terms = Vec::new();
            for i in 0..self.n() {
                for j in i..self.n() {
                    let a = self.matrix[i][j];
                    if a == 0 {
                        continue;
                    }
                    let c = if a == 1 { String::new() } else { entry(a) };
                    if i == j {
                        terms.push(format!("{c}X{i}^2"));
                    } else {
                        terms.push(format!("{c}X{i}X{j}"));
                    }
                }
            }
            if terms.is_empty() {
                "0".into()
            } else {
                terms.join(" + ")
            }
        } else {
            let rows: Vec<String> = self
                .matrix
                .iter()
                .map(|r| projspace::format_vector(t, r))
                .collect();
            format!("{} s={} [{}]", self.kind.name(), self.s, rows.join("; "))
        }
    }
}

impl fmt::Display for FormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StandardKind {
    Hyperbolic,
    Elliptic,
    Parabolic,
    Hermitian,
    Alternating,
}

impl StandardKind {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "hyperbolic" => StandardKind::Hyperbolic,
            "elliptic" => StandardKind::Elliptic,
            "parabolic" => StandardKind::Parabolic,
            "hermitian" => StandardKind::Hermitian,
            "alternating" | "symplectic" => StandardKind::Alternating,
            _ => return Err(Error::Parse(format!("unknown standard form '{s}'"))),
        })
    }
}

/// `X^2 + bXY + cY^2` with `(b, c)` the least pair (in element order) making
/// it irreducible.
pub fn elliptic_binary(field: &Field) -> (u32, u32) {
    for &b in field.elements() {
        for &c in field.nonzero() {
            let has_root = field
                .elements()
                .iter()
                .any(|&x| field.add(field.add(field.mul(x, x), field.mul(b, x)), c) == 0);
            if !has_root {
                return (b, c);
            }
        }
    }
    unreachable!("every finite field has an irreducible quadratic")
}

/// Standard forms: `X0X1 + X2X3 + ...`, `f(X0,X1) + X2X3 + ...`,
/// `X0^2 + X1X2 + ...`, `Σ x_i y_i^σ` and `Σ (x_{2i} y_{2i+1} - x_{2i+1} y_{2i})`.
pub fn standard_form(kind: StandardKind, n: usize, field: &Field) -> Result<FormSpec> {
    let even = n.is_multiple_of(2);
    let parity = |ok: bool, what: &str| {
        if ok && n > 0 {
            Ok(())
        } else {
            Err(Error::Precondition(format!("{what} forms need {} vector dimension", if even { "odd" } else { "even" })))
        }
    };
    let mut m = vec![vec![0u32; n]; n];
    match kind {
        StandardKind::Hyperbolic | StandardKind::Elliptic => {
            parity(even, "hyperbolic and elliptic")?;
            for i in (0..n).step_by(2) {
                m[i][i + 1] = 1;
            }
            if kind == StandardKind::Elliptic {
                let (b, c) = elliptic_binary(field);
                m[0][0] = 1;
                m[0][1] = b;
                m[1][1] = c;
            }
            FormSpec::new(field, FormKind::Quadratic, m, 0)
        }
        StandardKind::Parabolic => parabolic_form(field, n, 1),
        StandardKind::Hermitian => {
            if !field.degree().is_multiple_of(2) {
                return Err(Error::Precondition("hermitian forms need a square field order".into()));
            }
            FormSpec::new(field, FormKind::Hermitian, linalg::identity(n), field.degree() / 2)
        }
        StandardKind::Alternating => {
            parity(even, "alternating")?;
            for i in (0..n).step_by(2) {
                m[i][i + 1] = 1;
                m[i + 1][i] = field.neg(1);
            }
            FormSpec::new(field, FormKind::Alternating, m, 0)
        }
    }
}

/// `γ X0^2 + X1X2 + X3X4 + ...` on an odd number of variables.
pub fn parabolic_form(field: &Field, n: usize, gamma: u32) -> Result<FormSpec> {
    if n.is_multiple_of(2) {
        return Err(Error::Precondition("parabolic forms need odd vector dimension".into()));
    }
    if gamma == 0 {
        return Err(Error::Precondition("γ must be nonzero".into()));
    }
    let mut m = vec![vec![0u32; n]; n];
    m[0][0] = gamma;
    for i in (1..n).step_by(2) {
        m[i][i + 1] = 1;
    }
    FormSpec::new(field, FormKind::Quadratic, m, 0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PolarLabel {
    Hyperbolic,
    Elliptic,
    Parabolic,
    Hermitian,
    Symplectic,
    PseudoSymplectic,
    Atypical,
    Degenerate,
}

impl PolarLabel {
    pub fn name(self) -> &'static str {
        match self {
            PolarLabel::Hyperbolic => "hyperbolic",
            PolarLabel::Elliptic => "elliptic",
            PolarLabel::Parabolic => "parabolic",
            PolarLabel::Hermitian => "hermitian",
            PolarLabel::Symplectic => "symplectic",
            PolarLabel::PseudoSymplectic => "pseudo-symplectic",
            PolarLabel::Atypical => "atypical",
            PolarLabel::Degenerate => "degenerate",
        }
    }
}

impl fmt::Display for PolarLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolarType {
    pub label: PolarLabel,
    /// Vector dimension of a maximal totally singular (isotropic) subspace.
    pub witt_index: Option<usize>,
    /// Sign of a parabolic quadric in odd characteristic.
    pub sign: Option<i8>,
    /// `Q(x0)` at the anisotropic point of the orthogonal decomposition
    /// (parabolic quadrics).
    pub gamma: Option<u32>,
}

impl PolarType {
    fn bare(label: PolarLabel) -> Self {
        PolarType {
            label,
            witt_index: None,
            sign: None,
            gamma: None,
        }
    }
}

/// `{ x in S : β(x, w) = 0 for all rows w }`, as a subspace of `S`.
fn perp_within(f: &FormSpec, s: &ProjSubspace, ws: &[Vec<u32>]) -> ProjSubspace {
    let field = f.field();
    if ws.is_empty() || s.is_empty() {
        return s.clone();
    }
    // Linear conditions on the coordinates of S: Σ c_i β(s_i, w) = 0.
    let conds: Matrix = ws
        .iter()
        .map(|w| s.rows().iter().map(|si| f.beta(si, w)).collect())
        .collect();
    let sol = linalg::null_space(field.tower(), &conds, s.rank());
    let gens: Matrix = sol
        .iter()
        .map(|c| linalg::vec_mat(field.tower(), c, s.rows()))
        .collect();
    ProjSubspace::canonical(field, f.n(), &gens).expect("vectors of the ambient space")
}

fn singular(f: &FormSpec, x: &[u32]) -> bool {
    f.value(x) == 0
}

/// Greedy extension of a totally singular (isotropic) subspace over
/// enumerated singular points until none can be added.
pub fn witt_index(f: &FormSpec) -> usize {
    let whole = ProjSubspace::whole(f.field(), f.n());
    let mut w: Matrix = Vec::new();
    loop {
        let span = ProjSubspace::canonical(f.field(), f.n(), &w).expect("ambient vectors");
        let room = perp_within(f, &whole, &w);
        let next = room.find_point(|x| singular(f, x) && !span.contains_vector(x));
        match next {
            Some(x) => w.push(x),
            None => return w.len(),
        }
    }
}

/// Orthogonal decomposition of a quadratic form into hyperbolic pairs and an
/// anisotropic remainder: returns the number of pairs and a basis of the
/// remainder.
fn decompose(f: &FormSpec) -> (usize, Matrix) {
    let field = f.field();
    let mut s = ProjSubspace::whole(field, f.n());
    let mut pairs = 0;
    loop {
        let Some(x) = s.find_point(|v| singular(f, v)) else {
            return (pairs, s.rows().clone());
        };
        let Some(y) = s.find_point(|v| f.beta(&x, v) != 0) else {
            return (pairs, s.rows().clone());
        };
        let y = linalg::scale(field.tower(), &y, field.inv(f.beta(&x, &y)));
        let c = f.value(&y);
        let y = linalg::add_vec(field.tower(), &y, &linalg::scale(field.tower(), &x, field.neg(c)));
        s = perp_within(f, &s, &[x, y]);
        pairs += 1;
    }
}

fn quadratic_is_degenerate(f: &FormSpec) -> bool {
    let rad = linalg::null_space(f.field().tower(), f.gram(), f.n());
    if rad.is_empty() {
        return false;
    }
    let rad = ProjSubspace::canonical(f.field(), f.n(), &rad).expect("ambient vectors");
    rad.find_point(|x| singular(f, x)).is_some()
}

fn classify_quadratic(f: &FormSpec) -> Result<PolarType> {
    if quadratic_is_degenerate(f) {
        return Ok(PolarType::bare(PolarLabel::Degenerate));
    }
    let n = f.n();
    let m = witt_index(f);
    let (pairs, rest) = decompose(f);
    if pairs != m || rest.len() + 2 * pairs != n {
        return Err(Error::Invariant(format!(
            "Witt index {m} disagrees with {pairs} hyperbolic pairs"
        )));
    }
    let field = f.field();
    let label = match rest.len() {
        0 => PolarLabel::Hyperbolic,
        1 => PolarLabel::Parabolic,
        2 => PolarLabel::Elliptic,
        k => return Err(Error::Invariant(format!("anisotropic remainder of dimension {k}"))),
    };
    let (gamma, sign) = if label == PolarLabel::Parabolic {
        let g = f.value(&rest[0]);
        let sign = (field.p() != 2).then(|| if field.is_square(g).unwrap_or(false) { 1 } else { -1 });
        (Some(g), sign)
    } else {
        (None, None)
    };
    Ok(PolarType {
        label,
        witt_index: Some(m),
        sign,
        gamma,
    })
}

/// Classifies a form by its radical, structural tests and Witt index.
pub fn classify(f: &FormSpec) -> Result<PolarType> {
    if f.is_quadratic() {
        return classify_quadratic(f);
    }
    let field = f.field();
    let t = field.tower();
    let m = f.matrix();
    let n = f.n();
    if linalg::determinant(t, m) == 0 {
        return Ok(PolarType::bare(PolarLabel::Degenerate));
    }
    let with_index = |label| PolarType {
        label,
        witt_index: Some(witt_index(f)),
        sign: None,
        gamma: None,
    };
    if f.s() == 0 {
        let alternating =
            transpose_is(m, |a, b| a == field.neg(b)) && (0..n).all(|i| m[i][i] == 0);
        if alternating {
            return Ok(with_index(PolarLabel::Symplectic));
        }
        if transpose_is(m, |a, b| a == b) {
            if field.p() == 2 {
                return Ok(with_index(PolarLabel::PseudoSymplectic));
            }
            // Odd characteristic: the quadric β(x, x) = 0.
            let mut a = vec![vec![0; n]; n];
            for i in 0..n {
                a[i][i] = m[i][i];
                for j in i + 1..n {
                    a[i][j] = field.add(m[i][j], m[i][j]);
                }
            }
            return classify_quadratic(&FormSpec::new(field, FormKind::Quadratic, a, 0)?);
        }
        return Ok(PolarType::bare(PolarLabel::Atypical));
    }
    if 2 * f.s() == field.degree() && transpose_is(m, |a, b| a == field.frob(b, f.s())) {
        return Ok(with_index(PolarLabel::Hermitian));
    }
    Ok(PolarType::bare(PolarLabel::Atypical))
}

/// Number of projective points `<x>` with `Q(x) = 0` (or `β(x, x) = 0`).
pub fn projective_zero_count(f: &FormSpec) -> u64 {
    let mut count = 0;
    ProjSubspace::whole(f.field(), f.n()).for_each_point(|x| count += singular(f, x) as u64);
    count
}

/// Closed-form point counts of the nondegenerate quadrics of PG(n-1, q).
pub fn expected_zero_count(label: PolarLabel, n: usize, q: u64) -> Option<u64> {
    let m = (n / 2) as u32;
    match label {
        PolarLabel::Hyperbolic if n.is_multiple_of(2) => Some((q.pow(m - 1) + 1) * (q.pow(m) - 1) / (q - 1)),
        PolarLabel::Elliptic if n.is_multiple_of(2) => Some((q.pow(m - 1) - 1) * (q.pow(m) + 1) / (q - 1)),
        PolarLabel::Parabolic if n % 2 == 1 => Some((q.pow(2 * m) - 1) / (q - 1)),
        _ => None,
    }
}

/// `L_α: F_{q^t} -> F_q, x -> Tr(αx)`.
#[derive(Clone, Debug)]
pub struct TraceFunctional {
    big: Field,
    small: Field,
    alpha: u32,
}

impl TraceFunctional {
    /// `big` must be the full field of its tower; `small` a subfield of it.
    pub fn new(big: &Field, small: &Field, alpha: u32) -> Result<Self> {
        if alpha == 0 {
            return Err(Error::Precondition("α must be nonzero".into()));
        }
        if big.tower() != small.tower() || big.degree() != big.tower().h() {
            return Err(Error::FieldMismatch);
        }
        if !big.contains(alpha) {
            return Err(Error::NotInSubfield(alpha));
        }
        Ok(TraceFunctional {
            big: big.clone(),
            small: small.clone(),
            alpha,
        })
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn small(&self) -> &Field {
        &self.small
    }

    pub fn big(&self) -> &Field {
        &self.big
    }

    pub fn apply(&self, x: u32) -> u32 {
        let t = self.big.tower();
        t.trace_to(t.mul(self.alpha, x), self.small.degree())
            .expect("subfield degree divides")
    }
}

/// `L_α ∘ f` on `F_q^{rt}`, with Gram data evaluated on the basis of the
/// reduced coordinates.
pub fn trace_compose(f: &FormSpec, l: &TraceFunctional) -> Result<FormSpec> {
    if f.field() != l.big() {
        return Err(Error::FieldMismatch);
    }
    let ctx = ReductionContext::with_tower(l.big().tower(), f.n(), l.small().degree())?;
    let nn = ctx.n();
    let basis: Matrix = (0..nn)
        .map(|a| {
            let e: Vec<u32> = (0..nn).map(|b| (a == b) as u32).collect();
            ctx.unreduce_vector(&e).expect("length matches")
        })
        .collect();
    let small = l.small();
    let mut m = vec![vec![0u32; nn]; nn];
    if f.is_quadratic() {
        for a in 0..nn {
            m[a][a] = l.apply(f.value(&basis[a]));
            for b in a + 1..nn {
                m[a][b] = l.apply(f.beta(&basis[a], &basis[b]));
            }
        }
        FormSpec::new(small, FormKind::Quadratic, m, 0)
    } else {
        for a in 0..nn {
            for b in 0..nn {
                m[a][b] = l.apply(f.beta(&basis[a], &basis[b]));
            }
        }
        FormSpec::new(small, FormKind::Sesquilinear, m, f.s() % small.degree())
    }
}

/// Source rows of the reduction table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SourceKind {
    Hyperbolic,
    Elliptic,
    Parabolic,
    Hermitian,
    Alternating,
    PseudoSymplectic,
    Degenerate,
}

impl SourceKind {
    pub fn from_label(label: PolarLabel) -> Option<Self> {
        Some(match label {
            PolarLabel::Hyperbolic => SourceKind::Hyperbolic,
            PolarLabel::Elliptic => SourceKind::Elliptic,
            PolarLabel::Parabolic => SourceKind::Parabolic,
            PolarLabel::Hermitian => SourceKind::Hermitian,
            PolarLabel::Symplectic => SourceKind::Alternating,
            PolarLabel::PseudoSymplectic => SourceKind::PseudoSymplectic,
            PolarLabel::Degenerate => SourceKind::Degenerate,
            PolarLabel::Atypical => return None,
        })
    }
}

/// How σ acts on α.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SigmaAlpha {
    Fixed,
    Negated,
    Other,
}

/// Everything the reduction table looks at.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableQuery {
    pub source: SourceKind,
    /// Whether the source is a quadratic form.
    pub quadratic: bool,
    pub r: usize,
    pub t: usize,
    pub q: u64,
    /// Squareness of `αγ` in `F_{q^t}` (parabolic sources).
    pub alpha_gamma_square: Option<bool>,
    /// `σ(α)` against `α` (hermitian sources).
    pub sigma_alpha: Option<SigmaAlpha>,
}

impl TableQuery {
    /// Collects the table inputs from a source form, its classification and `L_α`.
    pub fn new(f: &FormSpec, source: &PolarType, l: &TraceFunctional) -> Result<Self> {
        let kind = SourceKind::from_label(source.label)
            .ok_or_else(|| Error::Precondition("atypical source form".into()))?;
        let big = l.big();
        let alpha = l.alpha();
        let alpha_gamma_square = match (kind, source.gamma) {
            (SourceKind::Parabolic, Some(g)) => Some(big.is_square(big.mul(alpha, g))?),
            _ => None,
        };
        let sigma_alpha = (kind == SourceKind::Hermitian).then(|| {
            let s = big.frob(alpha, f.s());
            if s == alpha {
                SigmaAlpha::Fixed
            } else if s == big.neg(alpha) {
                SigmaAlpha::Negated
            } else {
                SigmaAlpha::Other
            }
        });
        Ok(TableQuery {
            source: kind,
            quadratic: f.is_quadratic(),
            r: f.n(),
            t: (big.degree() / l.small().degree()) as usize,
            q: l.small().order() as u64,
            alpha_gamma_square,
            sigma_alpha,
        })
    }
}

/// Nondegeneracy of `L_α f` for `α != 0` as predicted from the source alone.
pub fn gill_nondegenerate(quadratic: bool, source_nondegenerate: bool, r: usize, q: u64) -> bool {
    if quadratic && q.is_multiple_of(2) && r % 2 == 1 {
        return false;
    }
    source_nondegenerate
}

/// The reduction table: type of `L_α f` from the type of `f` and the
/// conditions on `r, t, q, α, γ`. Never evaluates a form.
pub fn predicted_type(query: &TableQuery) -> Result<PolarLabel> {
    use PolarLabel as P;
    let TableQuery {
        source,
        quadratic,
        r,
        t,
        q,
        ..
    } = *query;
    let q_even = q % 2 == 0;
    if !gill_nondegenerate(quadratic, source != SourceKind::Degenerate, r, q) {
        return Ok(P::Degenerate);
    }
    let missing = |what: &str| Error::Precondition(format!("table query lacks {what}"));
    Ok(match source {
        SourceKind::Degenerate => P::Degenerate,
        SourceKind::Hyperbolic => P::Hyperbolic,
        SourceKind::Elliptic => P::Elliptic,
        SourceKind::Parabolic => {
            if t % 2 == 1 {
                P::Parabolic
            } else {
                let sq = query.alpha_gamma_square.ok_or_else(|| missing("αγ"))?;
                let half = q.pow(t as u32 / 2) % 4;
                if (half == 1 && !sq) || (half == 3 && sq) {
                    P::Hyperbolic
                } else {
                    P::Elliptic
                }
            }
        }
        SourceKind::Hermitian => {
            let sa = query.sigma_alpha.ok_or_else(|| missing("σ(α)"))?;
            match (t % 2 == 1, q_even, sa) {
                (true, _, SigmaAlpha::Fixed) => P::Hermitian,
                (true, _, _) => P::Atypical,
                (false, true, SigmaAlpha::Fixed) => P::Symplectic,
                (false, true, _) => P::Atypical,
                (false, false, SigmaAlpha::Negated) => P::Symplectic,
                (false, false, SigmaAlpha::Fixed) if r % 2 == 0 => P::Hyperbolic,
                (false, false, SigmaAlpha::Fixed) => P::Elliptic,
                (false, false, SigmaAlpha::Other) => P::Atypical,
            }
        }
        SourceKind::Alternating => P::Symplectic,
        SourceKind::PseudoSymplectic => {
            if !q_even {
                return Err(Error::Precondition(
                    "pseudo-symplectic forms exist only in even characteristic".into(),
                ));
            }
            P::PseudoSymplectic
        }
    })
}

fn totally_absolute(f: &FormSpec, rows: &[Vec<u32>]) -> bool {
    rows.iter().enumerate().all(|(i, x)| {
        let diag = if f.is_quadratic() {
            f.value(x) == 0
        } else {
            f.beta(x, x) == 0
        };
        diag && rows[i + 1..].iter().all(|y| f.beta(x, y) == 0 && f.beta(y, x) == 0)
    })
}

/// Outcome of [`absolute_image_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbsoluteImage {
    /// Number of absolute subspaces of the source, by projective dimension.
    pub checked: Vec<usize>,
    pub all_absolute: bool,
}

/// Field-reduces every absolute subspace of the polar space of `f` and checks
/// the image is absolute for `L_α f`.
pub fn absolute_image_check(f: &FormSpec, l: &TraceFunctional, budget: u128) -> Result<AbsoluteImage> {
    let composed = trace_compose(f, l)?;
    if classify(&composed)?.label == PolarLabel::Degenerate {
        return Err(Error::Precondition("composed form is degenerate".into()));
    }
    let ctx = ReductionContext::with_tower(l.big().tower(), f.n(), l.small().degree())?;
    let mut checked = Vec::new();
    let mut all_absolute = true;
    for k in 0..f.n() {
        let mut count = 0;
        for s in projspace::enumerate(f.field(), f.n(), k, budget)? {
            if !totally_absolute(f, s.rows()) {
                continue;
            }
            count += 1;
            let img = ctx.field_reduce(&s)?;
            all_absolute &= totally_absolute(&composed, img.rows());
        }
        if count == 0 {
            break;
        }
        checked.push(count);
    }
    Ok(AbsoluteImage {
        checked,
        all_absolute,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldTower;

    fn gf(q: u64) -> Field {
        FieldTower::of_order(q).unwrap().full()
    }

    #[test]
    fn standard_forms_over_gf2() {
        let f = gf(2);
        let h = standard_form(StandardKind::Hyperbolic, 4, &f).unwrap();
        assert_eq!(h.to_text(), "X0X1 + X2X3");
        let c = classify(&h).unwrap();
        assert_eq!(c.label, PolarLabel::Hyperbolic);
        assert_eq!(c.witt_index, Some(2));
        assert_eq!(projective_zero_count(&h), 9);
        let e = standard_form(StandardKind::Elliptic, 4, &f).unwrap();
        assert_eq!(classify(&e).unwrap().label, PolarLabel::Elliptic);
        assert_eq!(projective_zero_count(&e), 5);
        let p = standard_form(StandardKind::Parabolic, 3, &f).unwrap();
        assert_eq!(p.to_text(), "X0^2 + X1X2");
        assert_eq!(classify(&p).unwrap().label, PolarLabel::Parabolic);
        assert!(standard_form(StandardKind::Alternating, 3, &f).is_err());
        assert!(standard_form(StandardKind::Hermitian, 2, &f).is_err());
    }

    #[test]
    fn alternating_every_point_absolute() {
        let f = gf(3);
        let w = standard_form(StandardKind::Alternating, 4, &f).unwrap();
        assert_eq!(classify(&w).unwrap().label, PolarLabel::Symplectic);
        assert_eq!(projective_zero_count(&w), 40);
    }

    #[test]
    fn parabolic_sign_follows_gamma() {
        let f = gf(5);
        let plus = parabolic_form(&f, 3, 1).unwrap();
        let minus = parabolic_form(&f, 3, 2).unwrap();
        assert_eq!(classify(&plus).unwrap().sign, Some(1));
        assert_eq!(classify(&minus).unwrap().sign, Some(-1));
    }

    #[test]
    fn degenerate_forms() {
        let f = gf(3);
        let q = FormSpec::from_coefficients(&f, FormKind::Quadratic, &[0, 1, 0, 0, 0, 0], 0).unwrap();
        assert_eq!(classify(&q).unwrap().label, PolarLabel::Degenerate);
        let f4 = gf(4);
        let sq = FormSpec::from_coefficients(&f4, FormKind::Quadratic, &[1], 0).unwrap();
        assert_eq!(classify(&sq).unwrap().label, PolarLabel::Parabolic);
    }

    #[test]
    fn spec_table_rows() {
        let q = |source, r, t, q, sq, sa| TableQuery {
            source,
            quadratic: !matches!(source, SourceKind::Hermitian | SourceKind::Alternating),
            r,
            t,
            q,
            alpha_gamma_square: sq,
            sigma_alpha: sa,
        };
        let p = predicted_type(&q(SourceKind::Parabolic, 1, 2, 3, Some(true), None)).unwrap();
        assert_eq!(p, PolarLabel::Hyperbolic);
        let h = predicted_type(&q(SourceKind::Hermitian, 2, 2, 2, None, Some(SigmaAlpha::Fixed))).unwrap();
        assert_eq!(h, PolarLabel::Symplectic);
        let a = predicted_type(&q(SourceKind::Hermitian, 2, 3, 4, None, Some(SigmaAlpha::Other))).unwrap();
        assert_eq!(a, PolarLabel::Atypical);
        let d = predicted_type(&q(SourceKind::Parabolic, 1, 2, 2, None, None)).unwrap();
        assert_eq!(d, PolarLabel::Degenerate);
    }
}
