use num_bigint::BigUint;
use num_traits::One;

use super::FiniteAbelianGroup;

/// `|Aut|` of the abelian p-group of type `lambda` (any order).
///
/// With exponents sorted as `e_1 <= ... <= e_n`, `d_k = max{l : e_l = e_k}`
/// and `c_k = min{l : e_l = e_k}`:
///
/// `∏_k (p^{d_k} - p^{k-1}) · ∏_j p^{e_j (n - d_j)} · ∏_i p^{(e_i - 1)(n - c_i + 1)}`
pub fn aut_order_p_group(p: &BigUint, lambda: &[u32]) -> BigUint {
    let mut e: Vec<u32> = lambda.iter().copied().filter(|&x| x > 0).collect();
    e.sort_unstable();
    let n = e.len();
    let mut total = BigUint::one();
    for k in 0..n {
        let d = e.iter().rposition(|&x| x == e[k]).unwrap() + 1;
        let c = e.iter().position(|&x| x == e[k]).unwrap() + 1;
        total *= p.pow(d as u32) - p.pow(k as u32);
        total *= p.pow(e[k] * (n - d) as u32);
        total *= p.pow((e[k] - 1) * (n - c + 1) as u32);
    }
    total
}

/// Order of the automorphism group, multiplied over Sylow parts.
pub fn aut_order(g: &FiniteAbelianGroup) -> BigUint {
    g.primary_decomposition()
        .parts
        .iter()
        .map(|(p, lambda)| aut_order_p_group(p, lambda))
        .product()
}
