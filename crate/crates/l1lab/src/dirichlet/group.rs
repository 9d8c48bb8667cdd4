//! The unit group (Z/q)^* as a product of cyclic groups, one or two per
//! prime power, with discrete-log tables.

use serde::Serialize;

use super::arith::{euler_phi, factorize, gcd, inv_mod, mul_mod, pow_mod};
use crate::error::{domain, Result};

#[derive(Clone, Debug, Serialize)]
pub struct Generator {
    /// Residue modulo q, congruent to 1 at the other prime powers.
    pub residue: u64,
    pub order: u64,
    /// Index of the prime-power component it belongs to.
    pub component: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Component {
    pub prime: u64,
    pub power: u32,
    pub modulus: u64,
}

#[derive(Clone, Debug)]
pub struct UnitGroup {
    modulus: u64,
    components: Vec<Component>,
    generators: Vec<Generator>,
    /// lcm of the generator orders; character values are e(k / exponent).
    exponent: u64,
    /// dlog[a * r + i] = exponent of generator i in a, u32::MAX off units.
    dlog: Vec<u32>,
}

fn primitive_root_odd(p: u64, power: u32) -> u64 {
    let phi = p - 1;
    let primes: Vec<u64> = factorize(phi).into_iter().map(|(r, _)| r).collect();
    let mut g = 2;
    while !primes.iter().all(|&r| pow_mod(g, phi / r, p) != 1) {
        g += 1;
    }
    if power >= 2 && pow_mod(g, p - 1, p * p) == 1 {
        g += p;
    }
    g
}

/// Lifts a local residue to q: x = g mod m, x = 1 mod q/m.
fn crt_lift(g: u64, m: u64, q: u64) -> u64 {
    let rest = q / m;
    if rest == 1 {
        return g % q;
    }
    let inv = inv_mod(rest % m, m).expect("coprime components");
    let t = mul_mod((g + m - 1) % m, inv, m);
    (1 + rest * t) % q
}

impl UnitGroup {
    pub fn new(q: u64) -> Result<Self> {
        if q < 3 {
            return Err(domain("unit_group", format!("modulus must be at least 3, got {q}")));
        }
        if q > u32::MAX as u64 / 4 {
            return Err(domain("unit_group", format!("modulus {q} is beyond desk scale")));
        }
        let mut components = Vec::new();
        let mut generators = Vec::new();
        // Local generator tables: (component, local generators with orders).
        let mut local: Vec<Vec<(u64, u64)>> = Vec::new();
        for (p, k) in factorize(q) {
            let m = p.pow(k);
            let ci = components.len();
            components.push(Component { prime: p, power: k, modulus: m });
            let gens: Vec<(u64, u64)> = if p == 2 {
                match k {
                    1 => vec![],
                    2 => vec![(3, 2)],
                    _ => vec![(m - 1, 2), (5, m / 4)],
                }
            } else {
                vec![(primitive_root_odd(p, k), euler_phi(m))]
            };
            for &(g, ord) in &gens {
                generators.push(Generator { residue: crt_lift(g, m, q), order: ord, component: ci });
            }
            local.push(gens);
        }
        let exponent = generators.iter().fold(1, |acc, g| acc / gcd(acc, g.order) * g.order);

        // Local dlog tables by enumerating products of generator powers.
        let r = generators.len();
        let mut offsets = Vec::new();
        let mut tables: Vec<Vec<Vec<u32>>> = Vec::new();
        let mut off = 0;
        for (c, gens) in components.iter().zip(&local) {
            offsets.push(off);
            off += gens.len();
            let m = c.modulus;
            let mut table = vec![Vec::new(); m as usize];
            match gens.len() {
                0 => table[1 % m as usize] = vec![],
                1 => {
                    let (g, ord) = gens[0];
                    let mut x = 1 % m;
                    for e in 0..ord {
                        table[x as usize] = vec![e as u32];
                        x = mul_mod(x, g, m);
                    }
                }
                _ => {
                    let (g0, o0) = gens[0];
                    let (g1, o1) = gens[1];
                    let mut x0 = 1;
                    for s in 0..o0 {
                        let mut x = x0;
                        for t in 0..o1 {
                            table[x as usize] = vec![s as u32, t as u32];
                            x = mul_mod(x, g1, m);
                        }
                        x0 = mul_mod(x0, g0, m);
                    }
                }
            }
            tables.push(table);
        }
        let mut dlog = vec![u32::MAX; q as usize * r];
        for a in 1..q {
            if gcd(a, q) != 1 {
                continue;
            }
            for (ci, c) in components.iter().enumerate() {
                let loc = &tables[ci][(a % c.modulus) as usize];
                for (j, &e) in loc.iter().enumerate() {
                    dlog[a as usize * r + offsets[ci] + j] = e;
                }
            }
        }
        Ok(Self { modulus: q, components, generators, exponent, dlog })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// Cyclic orders; their product is phi(q).
    pub fn structure(&self) -> Vec<u64> {
        self.generators.iter().map(|g| g.order).collect()
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn order(&self) -> u64 {
        self.generators.iter().map(|g| g.order).product()
    }

    /// Exponents of a on the generators, or None when gcd(a, q) > 1.
    pub fn dlog(&self, a: u64) -> Option<&[u32]> {
        let r = self.generators.len();
        let a = (a % self.modulus) as usize;
        if gcd(a as u64, self.modulus) != 1 {
            return None;
        }
        Some(&self.dlog[a * r..(a + 1) * r])
    }
}

#[cfg(test)]
mod tests {
    use super::super::arith::mult_order;
    use super::*;

    #[test]
    fn generators_have_declared_orders() {
        for q in [3u64, 4, 5, 8, 9, 12, 15, 16, 24, 27, 32, 45, 100, 241, 625, 1000, 2047] {
            let g = UnitGroup::new(q).unwrap();
            assert_eq!(g.order(), euler_phi(q), "q={q}");
            for gen in g.generators() {
                assert_eq!(mult_order(gen.residue, q), Some(gen.order), "q={q}");
            }
        }
    }

    #[test]
    fn dlog_reconstructs_residues() {
        for q in [5u64, 8, 36, 63, 80, 105] {
            let g = UnitGroup::new(q).unwrap();
            for a in 1..q {
                match g.dlog(a) {
                    None => assert_ne!(gcd(a, q), 1),
                    Some(e) => {
                        let x = g
                            .generators()
                            .iter()
                            .zip(e)
                            .fold(1, |acc, (gen, &k)| mul_mod(acc, pow_mod(gen.residue, k as u64, q), q));
                        assert_eq!(x, a, "q={q}");
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_small_moduli() {
        assert!(UnitGroup::new(2).is_err());
    }
}
