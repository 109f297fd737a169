//! Standard graph families.
//!
//! Sierpinski approximations use address ids `"<word>.<corner>"`: the point
//! `F_w(p_c)` of the level-`n` gasket, written in a canonical form so that
//! every level-`n` id is also a level-`n+1` id.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::form::{GraphForm, MeasureSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Path,
    Cycle,
    Complete,
    Sierpinski,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "path" => Ok(Family::Path),
            "cycle" => Ok(Family::Cycle),
            "complete" => Ok(Family::Complete),
            "sierpinski" => Ok(Family::Sierpinski),
            other => Err(Error::InvalidSize(format!("unknown family `{other}`"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Path => "path",
            Family::Cycle => "cycle",
            Family::Complete => "complete",
            Family::Sierpinski => "sierpinski",
        })
    }
}

/// Uniform weights applied to every edge / vertex of a generated family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParams {
    pub conductance: f64,
    pub measure: f64,
    pub killing: f64,
}

impl Default for FamilyParams {
    fn default() -> Self {
        Self {
            conductance: 1.0,
            measure: 1.0,
            killing: 0.0,
        }
    }
}

/// Generates a family member. For `Sierpinski`, `n` is the approximation
/// level (`>= 0`); for the others it is the vertex count (`>= 1`, cycles
/// need `>= 3`).
pub fn generate(family: Family, n: usize, params: FamilyParams) -> Result<GraphForm> {
    let (ids, edges): (Vec<String>, Vec<(usize, usize)>) = match family {
        Family::Path => {
            require(n >= 1, "path needs n >= 1")?;
            (numbered(n), (1..n).map(|i| (i - 1, i)).collect())
        }
        Family::Cycle => {
            require(n >= 3, "cycle needs n >= 3")?;
            let mut e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
            e.push((0, n - 1));
            (numbered(n), e)
        }
        Family::Complete => {
            require(n >= 1, "complete graph needs n >= 1")?;
            let e = (0..n)
                .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                .collect();
            (numbered(n), e)
        }
        Family::Sierpinski => {
            require(n <= 10, "sierpinski level above 10 is not supported")?;
            sierpinski(n)
        }
    };
    let len = ids.len();
    let space = MeasureSpace::new(ids, vec![params.measure; len])?;
    GraphForm::from_indexed(
        space,
        edges.into_iter().map(|(i, j)| (i, j, params.conductance)),
        vec![params.killing; len],
    )
}

fn require(ok: bool, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidSize(msg.to_string()))
    }
}

fn numbered(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

/// Canonical id of the point `F_word(p_corner)`.
///
/// Trailing letters equal to the corner are dropped (`F_c(p_c) = p_c`). What
/// remains is either a corner of the unit triangle or the midpoint
/// `F_{u i}(p_c) = F_{u c}(p_i)`, written with the smaller letter last in
/// the word.
pub fn sierpinski_id(word: &[u8], corner: u8) -> String {
    let mut end = word.len();
    while end > 0 && word[end - 1] == corner {
        end -= 1;
    }
    let (w, c): (Vec<u8>, u8) = if end == 0 {
        (Vec::new(), corner)
    } else {
        let last = word[end - 1];
        if last < corner {
            (word[..end].to_vec(), corner)
        } else {
            let mut w = word[..end - 1].to_vec();
            w.push(corner);
            (w, last)
        }
    };
    let w: String = w.iter().map(|d| char::from(b'0' + d)).collect();
    format!("{w}.{c}")
}

fn sierpinski(level: usize) -> (Vec<String>, Vec<(usize, usize)>) {
    let mut ids = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut edges = Vec::new();
    let count = 3usize.pow(level as u32);
    for k in 0..count {
        let mut word = vec![0u8; level];
        let mut r = k;
        for slot in word.iter_mut().rev() {
            *slot = (r % 3) as u8;
            r /= 3;
        }
        let corners: Vec<usize> = (0..3u8)
            .map(|c| {
                let id = sierpinski_id(&word, c);
                *index.entry(id.clone()).or_insert_with(|| {
                    ids.push(id);
                    ids.len() - 1
                })
            })
            .collect();
        edges.push((corners[0], corners[1]));
        edges.push((corners[0], corners[2]));
        edges.push((corners[1], corners[2]));
    }
    (ids, edges)
}
