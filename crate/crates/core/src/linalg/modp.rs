//! Rank over the prime field `Z/p`.

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};

use super::matrix::IntMatrix;
use crate::error::{Error, Result};
use crate::groups::factor::is_prime_u64;

const MACHINE_LIMIT: u64 = 1 << 31;

/// Rank of `m` reduced modulo the prime `p`. Primality is verified for
/// `p < 2^31`; larger moduli are taken on trust.
pub fn rank_mod_p(m: &IntMatrix, p: &BigUint) -> Result<usize> {
    match p.to_u64() {
        Some(small) if small < MACHINE_LIMIT => {
            if !is_prime_u64(small) {
                return Err(Error::NonPrimeModulus(p.to_string()));
            }
            Ok(rank_mod_small(m, small))
        }
        _ => Ok(rank_mod_big(m, p)),
    }
}

/// Entries of `m` reduced into `[0, p)`.
fn reduce_mod_small(m: &IntMatrix, p: u64) -> Vec<u64> {
    match m.as_i64() {
        Some(v) => v.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect(),
        None => {
            let pb = BigInt::from(p);
            m.to_bigints()
                .iter()
                .map(|x| {
                    let r = ((x % &pb) + &pb) % &pb;
                    r.to_u64().expect("residue below p")
                })
                .collect()
        }
    }
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Row echelon rank of a row-major residue matrix, `p < 2^31`.
fn rank_of_residues(mut a: Vec<u64>, rows: usize, cols: usize, p: u64) -> usize {
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&i| a[i * cols + col] != 0) else {
            continue;
        };
        if piv != rank {
            for j in col..cols {
                a.swap(piv * cols + j, rank * cols + j);
            }
        }
        let inv = pow_mod(a[rank * cols + col], p - 2, p);
        for j in col..cols {
            a[rank * cols + j] = a[rank * cols + j] * inv % p;
        }
        for i in rank + 1..rows {
            let f = a[i * cols + col];
            if f == 0 {
                continue;
            }
            for j in col..cols {
                let sub = f * a[rank * cols + j] % p;
                a[i * cols + j] = (a[i * cols + j] + p - sub) % p;
            }
        }
        rank += 1;
    }
    rank
}

fn rank_mod_small(m: &IntMatrix, p: u64) -> usize {
    rank_of_residues(reduce_mod_small(m, p), m.rows(), m.cols(), p)
}

fn rank_mod_big(m: &IntMatrix, p: &BigUint) -> usize {
    let (rows, cols) = (m.rows(), m.cols());
    let pi = BigInt::from(p.clone());
    let mut a: Vec<BigUint> = m
        .to_bigints()
        .iter()
        .map(|x| (((x % &pi) + &pi) % &pi).into_parts().1)
        .collect();
    let exp = p - 2u32;
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&i| !a[i * cols + col].is_zero()) else {
            continue;
        };
        if piv != rank {
            for j in col..cols {
                a.swap(piv * cols + j, rank * cols + j);
            }
        }
        let inv = a[rank * cols + col].modpow(&exp, p);
        for j in col..cols {
            a[rank * cols + j] = &a[rank * cols + j] * &inv % p;
        }
        for i in rank + 1..rows {
            if a[i * cols + col].is_zero() {
                continue;
            }
            let f = a[i * cols + col].clone();
            for j in col..cols {
                let sub = &f * &a[rank * cols + j] % p;
                a[i * cols + j] = (&a[i * cols + j] + p - sub) % p;
            }
        }
        rank += 1;
    }
    rank
}
