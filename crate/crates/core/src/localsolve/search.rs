use super::{Certificate, HomogeneousForm, SolubilityVerdict, Status};
use crate::arith::{self, mul_mod};
use crate::error::{invalid, Result};

/// Arithmetic is done modulo p^M with p^M ≤ 2^62; this is M.
fn precision(p: u64) -> u32 {
    let mut m = 0;
    let mut q: u128 = 1;
    while q * p as u128 <= 1u128 << 62 {
        q *= p as u128;
        m += 1;
    }
    m
}

/// Largest depth bound the search supports at `p`.
pub fn max_depth(p: u64) -> u32 {
    precision(p).saturating_sub(1)
}

/// 2·(Σ v_p(coefficients)) + 3, the default residue depth at `p`.
pub fn default_depth(form: &HomogeneousForm, p: u64) -> u32 {
    let proxy: u32 = form
        .coefficients()
        .map(|c| arith::valuation(c as i128, p))
        .sum();
    2 * proxy + 3
}

struct Compiled {
    p: u64,
    m: u32,
    pm: u64,
    degree: usize,
    value: Vec<(u64, Vec<u32>)>,
    derivs: Vec<Vec<(u64, Vec<u32>)>>,
}

impl Compiled {
    fn new(form: &HomogeneousForm, p: u64) -> Self {
        let m = precision(p);
        let pm = p.pow(m);
        let red = |c: i128| arith::rem(c, pm);
        let value = form
            .terms()
            .iter()
            .map(|(c, e)| (red(*c as i128), e.clone()))
            .collect();
        let derivs = (0..form.nvars())
            .map(|i| {
                form.derivative_terms(i)
                    .into_iter()
                    .map(|(c, e)| (red(c), e))
                    .collect()
            })
            .collect();
        Compiled {
            p,
            m,
            pm,
            degree: form.degree() as usize,
            value,
            derivs,
        }
    }

    fn powers(&self, x: &[u64], out: &mut Vec<u64>) {
        let w = self.degree + 1;
        out.clear();
        out.resize(x.len() * w, 1);
        for (i, &xi) in x.iter().enumerate() {
            for k in 1..w {
                out[i * w + k] = mul_mod(out[i * w + k - 1], xi, self.pm);
            }
        }
    }

    fn eval(&self, terms: &[(u64, Vec<u32>)], pw: &[u64]) -> u64 {
        let w = self.degree + 1;
        let mut acc = 0u64;
        for (c, e) in terms {
            let mut t = *c;
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = mul_mod(t, pw[i * w + k as usize], self.pm);
                }
            }
            acc = (acc + t) % self.pm;
        }
        acc
    }

    /// Valuation of a residue mod p^M, capped at M.
    fn val(&self, r: u64) -> u32 {
        if r == 0 {
            self.m
        } else {
            arith::valuation(r as i128, self.p)
        }
    }
}

struct Search<'a> {
    c: &'a Compiled,
    chart: usize,
    depth: u32,
    hit_depth: bool,
    deepest: u32,
    pw: Vec<u64>,
}

impl Search<'_> {
    fn node(&mut self, x: &mut Vec<u64>, k: u32, pk: u64) -> Option<Certificate> {
        let c = self.c;
        c.powers(x, &mut self.pw);
        let f = c.eval(&c.value, &self.pw);
        let vf = c.val(f);
        if vf < k {
            return None;
        }
        self.deepest = self.deepest.max(k);
        let mut gmin = u32::MAX;
        for (i, d) in c.derivs.iter().enumerate() {
            let g = c.val(c.eval(d, &self.pw));
            if g < c.m && vf > 2 * g {
                return Some(Certificate::Hensel {
                    residues: x.clone(),
                    level: k,
                    index: i,
                    value_valuation: vf,
                    derivative_valuation: g,
                });
            }
            gmin = gmin.min(g);
        }
        if k >= self.depth {
            self.hit_depth = true;
            return None;
        }
        // Every partial derivative is divisible by p here, so F(x + p^k t) is
        // F(x) mod p^(k+1) for all t: the children survive or die together.
        debug_assert!(gmin >= 1);
        if vf < k + 1 {
            self.deepest = self.deepest.max(k + 1);
            return None;
        }
        let free: Vec<usize> = (0..x.len()).filter(|&i| i != self.chart).collect();
        let base = x.clone();
        let mut t = vec![0u64; free.len()];
        let npk = pk * c.p;
        loop {
            for (slot, &i) in free.iter().enumerate() {
                x[i] = base[i] + pk * t[slot];
            }
            if let Some(cert) = self.node(x, k + 1, npk) {
                return Some(cert);
            }
            let mut s = 0;
            loop {
                if s == t.len() {
                    x.copy_from_slice(&base);
                    return None;
                }
                t[s] += 1;
                if t[s] < c.p {
                    break;
                }
                t[s] = 0;
                s += 1;
            }
        }
    }
}

/// Decides whether `form` has a nontrivial zero over Q_p by walking primitive
/// residue vectors mod p, p², … up to `depth_bound`.
///
/// Each projective chart fixes its first unit coordinate to 1 (earlier
/// coordinates divisible by p). A branch is `Soluble` once some node x mod p^k
/// satisfies v(F(x)) > 2·v(∂ᵢF(x)); it is dead once F(x) ≢ 0 mod p^k.
/// `Insoluble` means every branch died; `Unknown` means some branch was still
/// alive at the depth bound.
pub fn padic_point_search(
    form: &HomogeneousForm,
    p: u64,
    depth_bound: u32,
) -> Result<SolubilityVerdict> {
    if !arith::is_prime(p) {
        return invalid(format!("{p} is not prime"));
    }
    if depth_bound < 1 {
        return invalid("depth bound must be at least 1");
    }
    if depth_bound > max_depth(p) {
        return invalid(format!(
            "depth bound {depth_bound} exceeds the supported {} at p = {p}",
            max_depth(p)
        ));
    }
    let compiled = Compiled::new(form, p);
    let n = form.nvars();
    let mut hit = false;
    let mut deepest = 0;
    for chart in 0..n {
        let mut search = Search {
            c: &compiled,
            chart,
            depth: depth_bound,
            hit_depth: false,
            deepest: 0,
            pw: Vec::new(),
        };
        // Level-1 residues: 0 before the chart, 1 at it, free after it.
        let mut x = vec![0u64; n];
        x[chart] = 1;
        let tail = n - chart - 1;
        let mut t = vec![0u64; tail];
        'level1: loop {
            for s in 0..tail {
                x[chart + 1 + s] = t[s];
            }
            if let Some(cert) = search.node(&mut x, 1, p) {
                return Ok(SolubilityVerdict {
                    status: Status::Soluble,
                    certificate: Some(cert),
                    depth: search.deepest,
                });
            }
            let mut s = 0;
            loop {
                if s == tail {
                    break 'level1;
                }
                t[s] += 1;
                if t[s] < p {
                    break;
                }
                t[s] = 0;
                s += 1;
            }
        }
        hit |= search.hit_depth;
        deepest = deepest.max(search.deepest);
    }
    Ok(SolubilityVerdict {
        status: if hit { Status::Unknown } else { Status::Insoluble },
        certificate: None,
        depth: deepest.max(1),
    })
}
