//! δ_D(π) and Δ(π) from the action of a finite group on the components of a
//! fibre, given as an explicit list of permutations.

use std::collections::HashSet;

use num_rational::Ratio;

use crate::error::{Error, Result};

/// A finite group Γ acting on the irreducible components of a fibre, each
/// component carrying a multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentAction {
    group_size: usize,
    elements: Vec<Vec<usize>>,
    multiplicities: Vec<u32>,
}

fn malformed<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::MalformedAction(msg.into()))
}

fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    // (a ∘ b)(i) = a(b(i))
    b.iter().map(|&j| a[j]).collect()
}

impl ComponentAction {
    /// Validates the element list: every element a permutation of the
    /// components, the identity present, the set closed under composition,
    /// and multiplicities preserved. Repeated elements are allowed (the group
    /// may act through a quotient).
    pub fn new(elements: Vec<Vec<usize>>, multiplicities: Vec<u32>) -> Result<Self> {
        let k = multiplicities.len();
        if k == 0 {
            return malformed("no components");
        }
        if multiplicities.contains(&0) {
            return malformed("multiplicities must be positive");
        }
        if elements.is_empty() {
            return malformed("empty element list");
        }
        for g in &elements {
            if g.len() != k {
                return malformed(format!("element {g:?} does not act on {k} components"));
            }
            let mut seen = vec![false; k];
            for &j in g {
                if j >= k || seen[j] {
                    return malformed(format!("element {g:?} is not a permutation"));
                }
                seen[j] = true;
            }
            for (i, &j) in g.iter().enumerate() {
                if multiplicities[i] != multiplicities[j] {
                    return malformed(format!(
                        "element {g:?} maps component {} to one of different multiplicity",
                        i + 1
                    ));
                }
            }
        }
        let set: HashSet<&Vec<usize>> = elements.iter().collect();
        let identity: Vec<usize> = (0..k).collect();
        if !set.contains(&identity) {
            return malformed("identity missing");
        }
        for a in &set {
            for b in &set {
                if !set.contains(&compose(a, b)) {
                    return malformed(format!("not closed: {a:?} ∘ {b:?}"));
                }
            }
        }
        Ok(ComponentAction {
            group_size: elements.len(),
            elements,
            multiplicities,
        })
    }

    pub fn trivial(multiplicities: Vec<u32>) -> Result<Self> {
        let k = multiplicities.len();
        Self::new(vec![(0..k).collect()], multiplicities)
    }

    pub fn group_size(&self) -> usize {
        self.group_size
    }

    pub fn elements(&self) -> &[Vec<usize>] {
        &self.elements
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.multiplicities
    }

    pub fn components(&self) -> usize {
        self.multiplicities.len()
    }
}

/// Proportion of group elements fixing at least one multiplicity-1 component.
pub fn delta(action: &ComponentAction) -> Ratio<u64> {
    let fixing = action
        .elements
        .iter()
        .filter(|g| {
            g.iter()
                .enumerate()
                .any(|(i, &j)| i == j && action.multiplicities[i] == 1)
        })
        .count();
    Ratio::new(fixing as u64, action.group_size as u64)
}

/// Δ = Σ_D (1 − δ_D).
pub fn delta_total(divisors: &[ComponentAction]) -> Ratio<u64> {
    divisors
        .iter()
        .fold(Ratio::from_integer(0), |acc, a| acc + (Ratio::from_integer(1) - delta(a)))
}

/// A divisor name with its action, as read from an action document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorAction {
    pub name: String,
    pub action: ComponentAction,
}

/// Parses an action document.
///
/// ```text
/// # comment
/// divisor a=0
/// multiplicities 1 1
/// element ()
/// element (1 2)
/// ```
///
/// Components are numbered from 1. An element is written in cycle notation,
/// `(1 2)(3 4)` or `()` for the identity, or in image notation `[2 1 4 3]`.
/// An optional `order N` line after `multiplicities` is checked against the
/// number of elements.
pub fn parse_actions(text: &str) -> Result<Vec<DivisorAction>> {
    struct Pending {
        name: String,
        mult: Option<Vec<u32>>,
        order: Option<usize>,
        elements: Vec<Vec<usize>>,
        line: usize,
    }
    fn finish(p: Pending) -> Result<DivisorAction> {
        let mult = match p.mult {
            Some(m) => m,
            None => {
                return Err(Error::Parse {
                    line: p.line,
                    msg: format!("divisor {} has no multiplicities line", p.name),
                })
            }
        };
        if let Some(o) = p.order {
            if o != p.elements.len() {
                return Err(Error::Parse {
                    line: p.line,
                    msg: format!("order {o} but {} elements listed", p.elements.len()),
                });
            }
        }
        let action = ComponentAction::new(p.elements, mult)?;
        Ok(DivisorAction {
            name: p.name,
            action,
        })
    }

    let mut out = Vec::new();
    let mut cur: Option<Pending> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = match line.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (line, ""),
        };
        let perr = |msg: String| Error::Parse { line: line_no, msg };
        match key {
            "divisor" => {
                if let Some(p) = cur.take() {
                    out.push(finish(p)?);
                }
                if rest.is_empty() {
                    return Err(perr("divisor needs a name".into()));
                }
                cur = Some(Pending {
                    name: rest.to_string(),
                    mult: None,
                    order: None,
                    elements: Vec::new(),
                    line: line_no,
                });
            }
            "multiplicities" | "order" | "element" => {
                let p = cur
                    .as_mut()
                    .ok_or_else(|| perr(format!("{key} before any divisor line")))?;
                match key {
                    "multiplicities" => {
                        let m: std::result::Result<Vec<u32>, _> =
                            rest.split_whitespace().map(str::parse).collect();
                        p.mult = Some(m.map_err(|e| perr(format!("bad multiplicity: {e}")))?);
                    }
                    "order" => {
                        p.order = Some(rest.parse().map_err(|e| perr(format!("bad order: {e}")))?);
                    }
                    _ => {
                        let k = p
                            .mult
                            .as_ref()
                            .ok_or_else(|| perr("element before multiplicities".into()))?
                            .len();
                        p.elements.push(parse_permutation(rest, k).map_err(perr)?);
                    }
                }
            }
            other => return Err(perr(format!("unknown keyword {other:?}"))),
        }
    }
    if let Some(p) = cur.take() {
        out.push(finish(p)?);
    }
    Ok(out)
}

/// One permutation of `k` components in cycle or image notation (1-based).
fn parse_permutation(s: &str, k: usize) -> std::result::Result<Vec<usize>, String> {
    let s = s.trim();
    let index = |tok: &str| -> std::result::Result<usize, String> {
        let i: usize = tok
            .parse()
            .map_err(|_| format!("bad component index {tok:?}"))?;
        if i == 0 || i > k {
            return Err(format!("component {i} out of range 1..={k}"));
        }
        Ok(i - 1)
    };
    if let Some(body) = s.strip_prefix('[') {
        let body = body
            .strip_suffix(']')
            .ok_or_else(|| format!("unterminated image list {s:?}"))?;
        let img: std::result::Result<Vec<usize>, String> = body
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(index)
            .collect();
        let img = img?;
        if img.len() != k {
            return Err(format!("image list has {} entries, expected {k}", img.len()));
        }
        return Ok(img);
    }
    let mut perm: Vec<usize> = (0..k).collect();
    let mut moved = vec![false; k];
    let mut rest = s;
    while !rest.is_empty() {
        let open = rest
            .strip_prefix('(')
            .ok_or_else(|| format!("expected '(' in {s:?}"))?;
        let close = open
            .find(')')
            .ok_or_else(|| format!("unterminated cycle in {s:?}"))?;
        let cycle: std::result::Result<Vec<usize>, String> = open[..close]
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(index)
            .collect();
        let cycle = cycle?;
        for (i, &a) in cycle.iter().enumerate() {
            if moved[a] {
                return Err(format!("component {} repeated in {s:?}", a + 1));
            }
            moved[a] = true;
            perm[a] = cycle[(i + 1) % cycle.len()];
        }
        rest = open[close + 1..].trim_start();
    }
    Ok(perm)
}
