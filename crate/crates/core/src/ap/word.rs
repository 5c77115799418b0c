use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::{ApError, ApproximantComplex, CellularSelfMap};
use crate::algebra::IntMatrix;
use crate::tiling::WordSystem;

/// Collared letters `(left, letter, right)` of a symbolic substitution
/// and the resulting one-dimensional approximant.
#[derive(Clone, Debug, Serialize)]
pub struct WordCollaring {
    pub level: usize,
    pub collared: Vec<[usize; 3]>,
    pub labels: Vec<String>,
    pub complex: ApproximantComplex,
    pub self_map: CellularSelfMap,
}

fn factors(sys: &WordSystem, level: usize) -> (BTreeSet<[usize; 3]>, BTreeSet<[usize; 4]>) {
    let mut f3 = BTreeSet::new();
    let mut f4 = BTreeSet::new();
    for start in 0..sys.letters.len() {
        let mut w = vec![start];
        for _ in 0..level {
            w = w.iter().flat_map(|&l| sys.rule[l].iter().copied()).collect();
        }
        for x in w.windows(3) {
            f3.insert([x[0], x[1], x[2]]);
        }
        for x in w.windows(4) {
            f4.insert([x[0], x[1], x[2], x[3]]);
        }
    }
    (f3, f4)
}

pub fn collar_word(sys: &WordSystem) -> Result<WordCollaring, ApError> {
    let mut prev = None;
    for level in 1..=sys.max_level {
        let cur = factors(sys, level);
        if !cur.0.is_empty() && prev.as_ref() == Some(&cur) {
            return build(sys, level, cur.0, cur.1);
        }
        prev = Some(cur);
    }
    Err(ApError::NotClosed { levels: sys.max_level })
}

fn build(sys: &WordSystem, level: usize, f3: BTreeSet<[usize; 3]>, f4: BTreeSet<[usize; 4]>) -> Result<WordCollaring, ApError> {
    let collared: Vec<[usize; 3]> = f3.into_iter().collect();
    let index: HashMap<[usize; 3], usize> = collared.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let ne = collared.len();
    // vertex items: 2i = left end of edge i, 2i + 1 = right end
    let mut parent: Vec<usize> = (0..2 * ne).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for w in &f4 {
        let a = index[&[w[0], w[1], w[2]]];
        let b = index[&[w[1], w[2], w[3]]];
        let (ra, rb) = (find(&mut parent, 2 * a + 1), find(&mut parent, 2 * b));
        parent[ra.max(rb)] = ra.min(rb);
    }
    let mut vid = HashMap::new();
    let mut vclass = vec![0; 2 * ne];
    for (i, vc) in vclass.iter_mut().enumerate() {
        let r = find(&mut parent, i);
        let n = vid.len();
        *vc = *vid.entry(r).or_insert(n);
    }
    let nv = vid.len();
    let mut d1 = IntMatrix::zeros(nv, ne);
    for e in 0..ne {
        d1.add_at(vclass[2 * e], e, -1);
        d1.add_at(vclass[2 * e + 1], e, 1);
    }
    let complex = ApproximantComplex::new(vec![nv, ne], vec![d1])?;

    let mut f1 = IntMatrix::zeros(ne, ne);
    let mut f0: Vec<Option<usize>> = vec![None; nv];
    for (e, &[x, a, y]) in collared.iter().enumerate() {
        let word: Vec<usize> = [x, a, y].iter().flat_map(|&l| sys.rule[l].iter().copied()).collect();
        let lo = sys.rule[x].len();
        let hi = lo + sys.rule[a].len();
        let mut first = None;
        let mut last = None;
        for p in lo..hi {
            let c = [word[p - 1], word[p], word[p + 1]];
            let child = *index.get(&c).ok_or(ApError::NotClosed { levels: level })?;
            f1.add_at(child, e, 1);
            first.get_or_insert(child);
            last = Some(child);
        }
        for (item, img) in [(2 * e, vclass[2 * first.unwrap()]), (2 * e + 1, vclass[2 * last.unwrap() + 1])] {
            match f0[vclass[item]] {
                None => f0[vclass[item]] = Some(img),
                Some(v) if v == img => {}
                Some(_) => {
                    return Err(ApError::InconsistentIdentification("vertex image depends on the representative".into()))
                }
            }
        }
    }
    let mut m0 = IntMatrix::zeros(nv, nv);
    for (v, img) in f0.iter().enumerate() {
        m0.add_at(img.unwrap(), v, 1);
    }
    let self_map = CellularSelfMap { chain: vec![m0, f1] };
    self_map.check(&complex)?;
    let labels = collared.iter().map(|c| c.iter().map(|&l| sys.letters[l].as_str()).collect::<Vec<_>>().join("")).collect();
    Ok(WordCollaring { level, collared, labels, complex, self_map })
}
