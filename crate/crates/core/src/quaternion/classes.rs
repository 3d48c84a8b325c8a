use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::enumerate::{lll_reduce, visit_short_vectors};
use super::order::{maximal_order, reduced_discriminant, right_order, unit_half_count};
use super::{build_algebra, Lattice, QuaternionAlgebra};
use crate::arith::{check_level, int, rat, Rational};
use crate::error::{Error, Result};

/// Left ideal classes of a maximal order: the finite set the Brandt matrices act on.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealClassData {
    pub level: u64,
    pub algebra: QuaternionAlgebra,
    pub maximal_order: Lattice,
    /// Class representatives, sorted by descending weight.
    pub reps: Vec<Lattice>,
    pub norms: Vec<u64>,
    pub right_orders: Vec<Lattice>,
    pub weights: Vec<u32>,
}

impl IdealClassData {
    pub fn compute(level: u64) -> Result<Self> {
        check_level(level)?;
        let alg = build_algebra(level)?;
        let order = maximal_order(&alg)?;
        left_ideal_classes(&order, &alg)
    }

    pub fn class_count(&self) -> usize {
        self.reps.len()
    }

    /// `sum 1/w_i`.
    pub fn mass(&self) -> Rational {
        self.weights.iter().map(|&w| rat(1, w as i64)).sum()
    }

    /// Re-checks the structural invariants; used after loading from disk.
    pub fn validate(&self) -> Result<()> {
        let alg = &self.algebra;
        let n = self.reps.len();
        if self.norms.len() != n || self.right_orders.len() != n || self.weights.len() != n {
            return Err(Error::Verification(
                "inconsistent class data lengths".into(),
            ));
        }
        if self.mass() != rat(self.level as i64 - 1, 12) {
            return Err(Error::Verification(format!(
                "mass {} differs from (N-1)/12",
                self.mass()
            )));
        }
        for i in 0..n {
            let ideal = &self.reps[i];
            if ideal_norm(ideal, &self.maximal_order)? != self.norms[i] {
                return Err(Error::Verification(format!("norm of class {i} is wrong")));
            }
            if !ideal.contains_lattice(&self.maximal_order.product(ideal, alg)) {
                return Err(Error::Verification(format!(
                    "class {i} is not a left ideal"
                )));
            }
            if !ideal.contains_lattice(&ideal.product(&self.right_orders[i], alg)) {
                return Err(Error::Verification(format!(
                    "right order {i} does not stabilize"
                )));
            }
            if unit_half_count(&self.right_orders[i], alg) != self.weights[i] {
                return Err(Error::Verification(format!("weight of class {i} is wrong")));
            }
        }
        Ok(())
    }
}

/// `(n, weights)` predicted by the residue of `N` mod 12, weights descending.
pub fn expected_shape(level: u64) -> (usize, Vec<u32>) {
    let (n, big): (u64, Vec<u32>) = match level % 12 {
        1 => ((level - 1) / 12, vec![]),
        5 => ((level + 7) / 12, vec![3]),
        7 => ((level + 5) / 12, vec![2]),
        11 => ((level + 13) / 12, vec![3, 2]),
        _ => panic!("level must be a prime > 3"),
    };
    let mut w = big;
    w.resize(n as usize, 1);
    (n as usize, w)
}

/// Reduced norm of a left ideal of `order`, from the index `[O : I] = Nr(I)^2`.
pub fn ideal_norm(ideal: &Lattice, order: &Lattice) -> Result<u64> {
    let ratio = ideal.covolume() / order.covolume();
    let bad = || Error::Verification(format!("index ratio {ratio} is not a square"));
    if !ratio.is_integer() {
        return Err(bad());
    }
    let sq = ratio.to_integer();
    let r = sq.sqrt();
    if &r * &r != sq {
        return Err(bad());
    }
    r.to_u64().ok_or_else(bad)
}

/// Whether `J = I b` for some `b` in the algebra, for left ideals of `order`:
/// holds iff `conj(I) J` has a vector of norm `Nr(I) Nr(J)`.
pub fn is_equivalent(
    alg: &QuaternionAlgebra,
    order: &Lattice,
    i: &Lattice,
    j: &Lattice,
) -> Result<bool> {
    let ni = ideal_norm(i, order)?;
    let nj = ideal_norm(j, order)?;
    Ok(equivalent_with_norms(alg, i, ni, j, nj))
}

fn equivalent_with_norms(
    alg: &QuaternionAlgebra,
    i: &Lattice,
    ni: u64,
    j: &Lattice,
    nj: u64,
) -> bool {
    let prod = i.conj().product(j, alg);
    let gram = prod
        .norm_gram(alg, &int((ni * nj) as i64))
        .expect("normalized norm form on conj(I) J is integral");
    let (reduced, _) = lll_reduce(&gram);
    let mut found = false;
    visit_short_vectors(&reduced, 1, |_, _| found = true);
    found
}

fn mod_p(x: &BigInt, p: u64) -> u64 {
    let p = BigInt::from(p);
    (((x % &p) + &p) % &p).to_u64().expect("residue")
}

/// All 2-dimensional subspaces of `F_p^4`, as reduced row echelon pairs.
fn planes(p: u64) -> Vec<[[u64; 4]; 2]> {
    let mut out = Vec::new();
    for c1 in 0..4 {
        for c2 in c1 + 1..4 {
            let free1: Vec<usize> = (c1 + 1..4).filter(|&t| t != c2).collect();
            let free2: Vec<usize> = (c2 + 1..4).collect();
            let slots = free1.len() + free2.len();
            for code in 0..p.pow(slots as u32) {
                let mut rest = code;
                let mut r1 = [0u64; 4];
                let mut r2 = [0u64; 4];
                r1[c1] = 1;
                r2[c2] = 1;
                for &t in &free1 {
                    r1[t] = rest % p;
                    rest /= p;
                }
                for &t in &free2 {
                    r2[t] = rest % p;
                    rest /= p;
                }
                out.push([r1, r2]);
            }
        }
    }
    out
}

fn in_plane(v: &[u64; 4], plane: &[[u64; 4]; 2], p: u64) -> bool {
    let mut w = *v;
    for row in plane {
        let piv = row.iter().position(|&x| x == 1).expect("pivot");
        let f = w[piv];
        for t in 0..4 {
            w[t] = (w[t] + p * p - f * row[t] % p) % p;
        }
    }
    w.iter().all(|&x| x == 0)
}

/// Left `order`-ideals `J` with `p I ⊂ J ⊂ I` and `[I : J] = p^2`, for `p` not
/// dividing the level. There are exactly `p + 1` of them.
pub fn neighbors(
    order: &Lattice,
    ideal: &Lattice,
    p: u64,
    alg: &QuaternionAlgebra,
) -> Result<Vec<Lattice>> {
    let ib = ideal.int_rows();
    let id = ideal.den();
    // Left multiplication by each order generator, in the ideal's basis, mod p.
    let mut actions = Vec::with_capacity(4);
    for r in order.int_rows() {
        let mut m = [[0u64; 4]; 4];
        for (k, b) in ib.iter().enumerate() {
            let prod = alg.mul_int(r, b);
            let c = ideal
                .int_coords(&prod, &(order.den() * id))
                .ok_or_else(|| Error::Verification("lattice is not a left ideal".into()))?;
            for t in 0..4 {
                m[k][t] = mod_p(&c[t], p);
            }
        }
        actions.push(m);
    }
    let stable = |plane: &[[u64; 4]; 2]| {
        actions.iter().all(|m| {
            plane.iter().all(|u| {
                let mut w = [0u64; 4];
                for k in 0..4 {
                    for t in 0..4 {
                        w[t] = (w[t] + u[k] * m[k][t]) % p;
                    }
                }
                in_plane(&w, plane, p)
            })
        })
    };
    let mut out = Vec::new();
    for plane in planes(p).iter().filter(|pl| stable(pl)) {
        let mut gens: Vec<[BigInt; 4]> = Vec::with_capacity(6);
        for u in plane {
            gens.push(std::array::from_fn(|t| {
                (0..4).map(|k| &ib[k][t] * u[k]).sum::<BigInt>()
            }));
        }
        for b in ib {
            gens.push(b.clone().map(|x| x * p));
        }
        out.push(Lattice::from_int_generators(gens, id.clone())?);
    }
    if out.len() as u64 != p + 1 {
        return Err(Error::Verification(format!(
            "found {} ideals of index {p}^2, expected {}",
            out.len(),
            p + 1
        )));
    }
    Ok(out)
}

struct ClassRep {
    ideal: Lattice,
    norm: u64,
    right: Lattice,
    weight: u32,
}

/// Breadth-first search through neighbouring ideals until the class weights
/// account for the full mass `(N-1)/12`.
pub fn left_ideal_classes(order: &Lattice, alg: &QuaternionAlgebra) -> Result<IdealClassData> {
    let level = alg.level;
    if reduced_discriminant(order, alg) != Some(BigInt::from(level)) {
        return Err(Error::Precondition(
            "order is not maximal of discriminant N".into(),
        ));
    }
    let target = rat(level as i64 - 1, 12);
    let w0 = unit_half_count(order, alg);
    let mut reps = vec![ClassRep {
        ideal: order.clone(),
        norm: 1,
        right: order.clone(),
        weight: w0,
    }];
    let mut mass = rat(1, w0 as i64);
    'primes: for p in [2u64, 3, 5, 7].into_iter().filter(|&p| p != level) {
        let mut idx = 0;
        while idx < reps.len() {
            if mass >= target {
                break 'primes;
            }
            let base_norm = reps[idx].norm;
            for cand in neighbors(order, &reps[idx].ideal, p, alg)? {
                let norm = base_norm * p;
                let known = reps
                    .iter()
                    .any(|r| equivalent_with_norms(alg, &r.ideal, r.norm, &cand, norm));
                if known {
                    continue;
                }
                let right = right_order(&cand, &int(norm as i64), alg);
                let weight = unit_half_count(&right, alg);
                mass += rat(1, weight as i64);
                reps.push(ClassRep {
                    ideal: cand,
                    norm,
                    right,
                    weight,
                });
            }
            idx += 1;
        }
    }
    if mass != target {
        return Err(Error::Verification(format!(
            "class search ended with mass {mass}, expected {target}"
        )));
    }
    reps.sort_by(|a, b| {
        b.weight
            .cmp(&a.weight)
            .then(a.norm.cmp(&b.norm))
            .then_with(|| a.ideal.cmp(&b.ideal))
    });
    Ok(IdealClassData {
        level,
        algebra: *alg,
        maximal_order: order.clone(),
        norms: reps.iter().map(|r| r.norm).collect(),
        weights: reps.iter().map(|r| r.weight).collect(),
        right_orders: reps.iter().map(|r| r.right.clone()).collect(),
        reps: reps.into_iter().map(|r| r.ideal).collect(),
    })
}
