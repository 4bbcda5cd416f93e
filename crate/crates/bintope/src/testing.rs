//! Deliberately naive reference implementations used by the test suites to
//! cross-check the production algorithms. Everything here favors obviousness
//! over speed and shares no code with the implementations it checks.

use crate::intlinalg::IntMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;

/// Determinant by Laplace expansion along the first row. Factorial cost;
/// intended for matrices up to about 8x8.
pub fn det_cofactor(a: &IntMatrix) -> BigInt {
    assert!(a.is_square(), "cofactor determinant needs a square matrix");
    let n = a.rows();
    if n == 0 {
        return BigInt::one();
    }
    if n == 1 {
        return a[(0, 0)].clone();
    }
    let mut acc = BigInt::zero();
    for j in 0..n {
        if a[(0, j)].is_zero() {
            continue;
        }
        let mut minor = IntMatrix::zeros(n - 1, n - 1);
        for i in 1..n {
            let mut jj = 0;
            for k in 0..n {
                if k == j {
                    continue;
                }
                minor[(i - 1, jj)] = a[(i, k)].clone();
                jj += 1;
            }
        }
        let term = &a[(0, j)] * det_cofactor(&minor);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Rank by Gaussian elimination over the rationals, carried out fraction-free
/// on integers: each update is the two-term minor formula with an exact
/// division by the previous pivot, which keeps entries minor-sized instead of
/// reduced fractions.
pub fn rank_rational(a: &IntMatrix) -> usize {
    let rows = a.rows();
    let cols = a.cols();
    let mut m: Vec<Vec<BigInt>> = (0..rows).map(|i| a.row(i).to_vec()).collect();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let (top, rest) = m.split_at_mut(rank + 1);
        let prow = &top[rank];
        for row in rest.iter_mut() {
            // The rescale applies to every row below the pivot, zero leading
            // entry or not; later exact divisions depend on it.
            for c in col + 1..cols {
                let num = &prow[col] * &row[c] - &row[col] * &prow[c];
                row[c] = num / &prev;
            }
            row[col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
    }
    rank
}

fn rat_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][col].recip();
        for v in rows[rank].iter_mut() {
            *v *= &inv;
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                for c in 0..cols {
                    let sub = &f * &rows[rank][c];
                    rows[r][c] -= sub;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Solves a square rational system by Gaussian elimination; `None` when the
/// matrix is singular.
pub fn rat_solve(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = a.len();
    assert!(a.iter().all(|row| row.len() == n) && b.len() == n);
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip();
        for v in a[col].iter_mut() {
            *v *= &inv;
        }
        b[col] *= &inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..n {
                    let sub = &f * &a[col][c];
                    a[r][c] -= sub;
                }
                let sub = &f * &b[col];
                b[r] -= sub;
            }
        }
    }
    Some(b)
}

/// One linear constraint `<coeffs, x> >= rhs`, or equality when `eq` is set.
#[derive(Clone, Debug)]
pub struct LinCon {
    pub coeffs: Vec<BigRational>,
    pub rhs: BigRational,
    pub eq: bool,
}

impl LinCon {
    pub fn ge(coeffs: Vec<BigRational>, rhs: BigRational) -> Self {
        LinCon { coeffs, rhs, eq: false }
    }
    pub fn eq(coeffs: Vec<BigRational>, rhs: BigRational) -> Self {
        LinCon { coeffs, rhs, eq: true }
    }
}

/// Exact feasibility of a small system of linear constraints by
/// Fourier-Motzkin elimination. Worst-case exponential; callers keep the
/// variable count at toy scale.
pub fn fm_feasible(constraints: &[LinCon]) -> bool {
    let nvars = constraints.first().map_or(0, |c| c.coeffs.len());
    let mut system: Vec<(Vec<BigRational>, BigRational)> = Vec::new();
    for con in constraints {
        assert_eq!(con.coeffs.len(), nvars, "inconsistent constraint arity");
        system.push((con.coeffs.clone(), con.rhs.clone()));
        if con.eq {
            let neg: Vec<BigRational> = con.coeffs.iter().map(|c| -c.clone()).collect();
            system.push((neg, -con.rhs.clone()));
        }
    }
    for var in (0..nvars).rev() {
        let mut lower: Vec<(Vec<BigRational>, BigRational)> = Vec::new();
        let mut upper: Vec<(Vec<BigRational>, BigRational)> = Vec::new();
        let mut rest: Vec<(Vec<BigRational>, BigRational)> = Vec::new();
        for (c, r) in system {
            if c[var].is_zero() {
                rest.push((c, r));
            } else if c[var].is_positive() {
                lower.push((c, r));
            } else {
                upper.push((c, r));
            }
        }
        for (lc, lr) in &lower {
            for (uc, ur) in &upper {
                // Scale so the eliminated coefficients cancel.
                let lscale = lc[var].recip();
                let uscale = -uc[var].clone().recip();
                let mut c: Vec<BigRational> = (0..var)
                    .map(|i| &lc[i] * &lscale + &uc[i] * &uscale)
                    .collect();
                c.resize(var, BigRational::zero());
                let r = lr * &lscale + ur * &uscale;
                rest.push((c, r));
            }
        }
        for (c, _) in rest.iter_mut() {
            c.truncate(var);
        }
        system = dedupe_constraints(rest);
    }
    system.iter().all(|(_, r)| !r.is_positive())
}

fn dedupe_constraints(
    cons: Vec<(Vec<BigRational>, BigRational)>,
) -> Vec<(Vec<BigRational>, BigRational)> {
    let mut seen: HashMap<String, (Vec<BigRational>, BigRational)> = HashMap::new();
    for (c, r) in cons {
        if c.iter().all(|v| v.is_zero()) {
            if r.is_positive() {
                // Infeasible constant constraint; keep it so the caller sees it.
                return vec![(c, r)];
            }
            continue;
        }
        // Canonical scale: first nonzero coefficient is +1 or -1... scale all
        // by 1/|first nonzero| so proportional constraints with the weaker
        // bound collapse.
        let lead = c.iter().find(|v| !v.is_zero()).unwrap().abs();
        let scale = lead.recip();
        let cn: Vec<BigRational> = c.iter().map(|v| v * &scale).collect();
        let rn = &r * &scale;
        let key = cn.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
        match seen.get_mut(&key) {
            Some((_, existing)) if *existing >= rn => {}
            Some((_, existing)) => *existing = rn,
            None => {
                seen.insert(key, (cn, rn));
            }
        }
    }
    seen.into_values().collect()
}

/// All cells of the regular subdivision of `points` induced by `lifting`,
/// found by brute force over every `(d+1)`-subset. A subset with an
/// invertible edge matrix is a cell when every other lifted point lies
/// strictly above its hyperplane; a point landing exactly on the hyperplane
/// of a lower subset makes the lifting degenerate. An affinely dependent
/// subset that still fits on a common lower supporting hyperplane (decided
/// by exact elimination) is a flat lower face and also degenerate. Returns
/// `None` for degenerate liftings.
pub fn brute_force_cells(points: &[Vec<BigInt>], lifting: &[i64]) -> Option<Vec<Vec<usize>>> {
    assert_eq!(points.len(), lifting.len());
    let n = points.len();
    let d = points.first().map_or(0, |p| p.len());
    if n < d + 1 {
        return Some(Vec::new());
    }
    let rat = |v: &BigInt| BigRational::from(v.clone());
    let mut cells = Vec::new();
    for subset in k_subsets(n, d + 1) {
        let base = subset[0];
        let a: Vec<Vec<BigRational>> = (1..=d)
            .map(|s| {
                (0..d)
                    .map(|c| rat(&points[subset[s]][c]) - rat(&points[base][c]))
                    .collect()
            })
            .collect();
        let b: Vec<BigRational> = (1..=d)
            .map(|s| BigRational::from_integer((lifting[base] - lifting[subset[s]]).into()))
            .collect();
        let Some(alpha) = rat_solve(a, b) else {
            if flat_lower_face(points, lifting, &subset) {
                return None;
            }
            continue;
        };
        let value = |idx: usize| -> BigRational {
            let mut v = BigRational::from_integer(lifting[idx].into());
            for c in 0..d {
                v += rat(&points[idx][c]) * &alpha[c];
            }
            v
        };
        let v0 = value(base);
        let mut lower = true;
        let mut tied = false;
        for other in 0..n {
            if subset.contains(&other) {
                continue;
            }
            let v = value(other);
            if v < v0 {
                lower = false;
                break;
            }
            if v == v0 {
                tied = true;
            }
        }
        if lower {
            if tied {
                return None;
            }
            cells.push(subset);
        }
    }
    Some(cells)
}

/// Whether all of `subset` lies on one lower supporting hyperplane, decided
/// by elimination over the exact node constraints.
fn flat_lower_face(points: &[Vec<BigInt>], lifting: &[i64], subset: &[usize]) -> bool {
    let mut cons = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let mut coeffs: Vec<BigRational> = p.iter().map(|c| BigRational::from(c.clone())).collect();
        coeffs.push(BigRational::from_integer((-1).into()));
        let rhs = BigRational::from_integer((-lifting[i]).into());
        if subset.contains(&i) {
            cons.push(LinCon::eq(coeffs, rhs));
        } else {
            cons.push(LinCon::ge(coeffs, rhs));
        }
    }
    fm_feasible(&cons)
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Normalized volume (`d! * euclidean volume`) of the convex hull of integer
/// points, by brute-force facet enumeration plus a recursive fan
/// triangulation from the lexicographically smallest vertex. Exact; intended
/// for `d <= 4`, `n <= 15` or so.
pub fn fan_triangulation_nvol(points: &[Vec<BigInt>]) -> BigInt {
    let d = points.first().map_or(0, |p| p.len());
    if d == 0 {
        return BigInt::zero();
    }
    let mut unique: Vec<Vec<BigInt>> = Vec::new();
    for p in points {
        assert_eq!(p.len(), d, "mixed dimensions in point set");
        if !unique.contains(p) {
            unique.push(p.clone());
        }
    }
    if unique.len() < d + 1 {
        return BigInt::zero();
    }
    let coords: Vec<Vec<BigRational>> = unique
        .iter()
        .map(|p| p.iter().map(|v| BigRational::from(v.clone())).collect())
        .collect();
    let all: Vec<usize> = (0..coords.len()).collect();
    let diffs: Vec<Vec<BigRational>> = all[1..]
        .iter()
        .map(|&i| sub_vec(&coords[i], &coords[0]))
        .collect();
    if rat_rank(diffs) < d {
        return BigInt::zero();
    }
    let simplices = triangulate_full(&coords, &all, d);
    let mut total = BigInt::zero();
    for s in &simplices {
        let mut m = IntMatrix::zeros(d, d);
        for (r, &i) in s[1..].iter().enumerate() {
            for c in 0..d {
                m[(r, c)] = &unique[i][c] - &unique[s[0]][c];
            }
        }
        total += det_cofactor(&m).abs();
    }
    total
}

/// Triangulates the convex hull of full-dimensional `idx` points living in
/// dimension `j` (coordinates may be rational in recursive calls). Returns
/// simplices as index lists into `coords`.
fn triangulate_full(coords: &[Vec<BigRational>], idx: &[usize], j: usize) -> Vec<Vec<usize>> {
    if j == 1 {
        let min = idx.iter().min_by_key(|&&i| coords[i][0].clone()).unwrap();
        let max = idx.iter().max_by_key(|&&i| coords[i][0].clone()).unwrap();
        return vec![vec![*min, *max]];
    }
    // Facets: supporting hyperplanes spanned by j affinely independent points.
    let mut facets: HashMap<String, Vec<usize>> = HashMap::new();
    for subset in k_subsets(idx.len(), j) {
        let pts: Vec<usize> = subset.iter().map(|&s| idx[s]).collect();
        let vs: Vec<Vec<BigRational>> = pts[1..]
            .iter()
            .map(|&p| sub_vec(&coords[p], &coords[pts[0]]))
            .collect();
        let h = cross_product(&vs, j);
        if h.iter().all(|v| v.is_zero()) {
            continue;
        }
        let c = dot(&h, &coords[pts[0]]);
        let mut positive = false;
        let mut negative = false;
        for &i in idx {
            let v = dot(&h, &coords[i]);
            if v > c {
                positive = true;
            } else if v < c {
                negative = true;
            }
            if positive && negative {
                break;
            }
        }
        if positive && negative {
            continue;
        }
        let (h, c) = canonical_hyperplane(h, c);
        let key = format!(
            "{}|{}",
            h.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","),
            c
        );
        facets.entry(key).or_insert_with(|| {
            idx.iter()
                .copied()
                .filter(|&i| dot(&h, &coords[i]) == c)
                .collect()
        });
    }
    let apex = *idx
        .iter()
        .min_by_key(|&&i| coords[i].clone())
        .expect("nonempty point set");
    let mut out = Vec::new();
    for tight in facets.values() {
        if tight.contains(&apex) {
            continue;
        }
        // Coordinates of the facet in a basis of its own hyperplane.
        let base = tight[0];
        let mut basis: Vec<Vec<BigRational>> = Vec::new();
        for &f in &tight[1..] {
            let v = sub_vec(&coords[f], &coords[base]);
            if !in_span(&basis, &v) {
                basis.push(v);
            }
            if basis.len() == j - 1 {
                break;
            }
        }
        assert_eq!(basis.len(), j - 1, "facet is not (j-1)-dimensional");
        let local: Vec<Vec<BigRational>> = tight
            .iter()
            .map(|&f| coords_in_basis(&basis, &sub_vec(&coords[f], &coords[base])))
            .collect();
        let local_idx: Vec<usize> = (0..tight.len()).collect();
        for s in triangulate_full(&local, &local_idx, j - 1) {
            let mut simplex: Vec<usize> = vec![apex];
            simplex.extend(s.iter().map(|&li| tight[li]));
            out.push(simplex);
        }
    }
    out
}

fn sub_vec(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Generalized cross product: the vector of signed maximal minors of the
/// `(j-1) x j` matrix of `vs`, orthogonal to all of them; zero iff the rows
/// are dependent.
fn cross_product(vs: &[Vec<BigRational>], j: usize) -> Vec<BigRational> {
    assert_eq!(vs.len(), j - 1);
    let mut h = Vec::with_capacity(j);
    for drop in 0..j {
        let minor: Vec<Vec<BigRational>> = vs
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != drop)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let det = rat_det(minor);
        h.push(if drop % 2 == 0 { det } else { -det });
    }
    h
}

fn rat_det(mut a: Vec<Vec<BigRational>>) -> BigRational {
    let n = a.len();
    if n == 0 {
        return BigRational::one();
    }
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        det *= &a[col][col];
        let inv = a[col][col].recip();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] * &inv;
            for c in col..n {
                let sub = &f * &a[col][c];
                a[r][c] -= sub;
            }
        }
    }
    det
}

fn canonical_hyperplane(h: Vec<BigRational>, c: BigRational) -> (Vec<BigRational>, BigRational) {
    let lead = h
        .iter()
        .find(|v| !v.is_zero())
        .expect("zero normal")
        .clone();
    let scale = lead.recip();
    (h.iter().map(|v| v * &scale).collect(), &c * &scale)
}

fn in_span(basis: &[Vec<BigRational>], v: &[BigRational]) -> bool {
    if basis.is_empty() {
        return v.iter().all(|x| x.is_zero());
    }
    // Reduce v against an echelonized copy of the basis.
    let mut rows: Vec<Vec<BigRational>> = basis.to_vec();
    rows.push(v.to_vec());
    rat_rank(rows) == rat_rank(basis.to_vec())
}

/// Coordinates of `v` in `basis` (full column rank, `v` in its span).
fn coords_in_basis(basis: &[Vec<BigRational>], v: &[BigRational]) -> Vec<BigRational> {
    let rows = v.len();
    let cols = basis.len();
    let mut aug: Vec<Vec<BigRational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<BigRational> = basis.iter().map(|b| b[r].clone()).collect();
            row.push(v[r].clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !aug[r][col].is_zero()) else {
            continue;
        };
        aug.swap(rank, p);
        let inv = aug[rank][col].recip();
        for x in aug[rank].iter_mut() {
            *x *= &inv;
        }
        for r in 0..rows {
            if r != rank && !aug[r][col].is_zero() {
                let f = aug[r][col].clone();
                for c in col..=cols {
                    let sub = &f * &aug[rank][c];
                    aug[r][c] -= sub;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    assert_eq!(rank, cols, "basis is not independent");
    let mut out = vec![BigRational::zero(); cols];
    for (r, &col) in pivots.iter().enumerate() {
        out[col] = aug[r][cols].clone();
    }
    out
}
