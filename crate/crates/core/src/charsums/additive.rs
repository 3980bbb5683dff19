//! Exact Fourier transform over the additive group `(Z/p)^k` of a field,
//! carried out modulo a prime `P ≡ 1 (mod p)` that exceeds every value we
//! need to recover.

use crate::numth;

pub(crate) struct AdditiveTransform {
    p: usize,
    k: u32,
    modulus: u64,
    /// Powers of a primitive `p`-th root of unity modulo `modulus`.
    roots: Vec<u64>,
    size_inv: u64,
}

impl AdditiveTransform {
    /// Works for results bounded by `2^31`; every field is far below that.
    pub(crate) fn new(p: u32, k: u32) -> Self {
        let p64 = p as u64;
        let mut m = ((1u64 << 31) - 1) / p64;
        let modulus = loop {
            let cand = m * p64 + 1;
            if numth::is_prime(cand) {
                break cand;
            }
            m -= 1;
        };
        let w = (2..)
            .map(|b| numth::pow_mod(b, (modulus - 1) / p64, modulus))
            .find(|&w| w != 1)
            .unwrap();
        let roots = (0..p64).map(|e| numth::pow_mod(w, e, modulus)).collect();
        let size = p64.pow(k) % modulus;
        let size_inv = numth::pow_mod(size, modulus - 2, modulus);
        AdditiveTransform { p: p as usize, k, modulus, roots, size_inv }
    }

    pub(crate) fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `f ↦ (χ ↦ Σ_x f(x) w^{±⟨χ,x⟩})`, in place.
    fn run(&self, data: &mut [u64], inverse: bool) {
        let p = self.p;
        let m = self.modulus;
        let root = |e: usize| {
            let e = e % p;
            self.roots[if inverse { (p - e) % p } else { e }]
        };
        let mut buf = vec![0u64; p];
        let mut stride = 1usize;
        for _ in 0..self.k {
            let block = stride * p;
            for start in (0..data.len()).step_by(block) {
                for off in 0..stride {
                    let base = start + off;
                    for (b, slot) in buf.iter_mut().enumerate() {
                        *slot = data[base + b * stride];
                    }
                    for a in 0..p {
                        let mut acc = 0u64;
                        for (b, &x) in buf.iter().enumerate() {
                            acc = (acc + x * root(a * b) % m) % m;
                        }
                        data[base + a * stride] = acc;
                    }
                }
            }
            stride = block;
        }
    }

    pub(crate) fn forward(&self, data: &mut [u64]) {
        self.run(data, false);
    }

    pub(crate) fn inverse(&self, data: &mut [u64]) {
        self.run(data, true);
        for x in data.iter_mut() {
            *x = *x * self.size_inv % self.modulus;
        }
    }
}
