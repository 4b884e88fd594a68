//! Exact maximum-a-posteriori decoding by recursive block composition.
//!
//! A level-`r` code is four level-`(r−1)` blocks. The joint distribution
//! `P(label, syndrome)` of each block is built bottom-up from the 16 patterns
//! of a level-1 block, and the top level combines the four child tables
//! conditioned on the observed syndrome.

use crate::code::{build_code, CodeSpec};
use crate::error::{Error, Result};
use crate::gf2::BitVec;

use super::compose::{derive, parity, to_word, AffineSystem, Composition};
use super::{argmax_lex, DecodeResult, Decoder};

/// Largest number of child bits enumerated when composing a full table.
const MAX_TABLE_BITS: usize = 24;

/// `P(raw label, syndrome)` for one block, stored as `entries[s << k | l]`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointTable {
    level: usize,
    label_bits: usize,
    syndrome_bits: usize,
    entries: Vec<f64>,
}

impl JointTable {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn label_bits(&self) -> usize {
        self.label_bits
    }

    pub fn syndrome_bits(&self) -> usize {
        self.syndrome_bits
    }

    pub fn get(&self, label: u64, syndrome: u64) -> f64 {
        self.entries[(syndrome << self.label_bits | label) as usize]
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().sum()
    }

    fn row(&self, syndrome: u64) -> &[f64] {
        let k = 1usize << self.label_bits;
        let start = syndrome as usize * k;
        &self.entries[start..start + k]
    }

    fn normalize(&mut self) {
        let t = self.total();
        if t > 0.0 {
            self.entries.iter_mut().for_each(|e| *e /= t);
        }
    }
}

/// Level-1 table by enumerating all patterns of one block.
fn base_table(code: &CodeSpec, p: f64) -> Result<JointTable> {
    let n = code.n();
    let k = code.num_logicals();
    let m = code.num_stabilizers();
    let zl: Vec<u64> = code.z_logicals().iter().map(to_word).collect::<Result<_>>()?;
    let zs: Vec<u64> = code.z_stabilizers().iter().map(to_word).collect::<Result<_>>()?;
    let mut entries = vec![0.0; 1 << (m + k)];
    for e in 0u64..(1 << n) {
        let w = e.count_ones() as i32;
        let prob = p.powi(w) * (1.0 - p).powi(n as i32 - w);
        let l = zl
            .iter()
            .enumerate()
            .fold(0u64, |a, (j, &z)| a | (parity(e, z) as u64) << j);
        let s = zs
            .iter()
            .enumerate()
            .fold(0u64, |a, (i, &z)| a | (parity(e, z) as u64) << i);
        entries[(s << k | l) as usize] += prob;
    }
    Ok(JointTable {
        level: code.level(),
        label_bits: k,
        syndrome_bits: m,
        entries,
    })
}

/// Parent table from a child table by enumerating every child assignment.
fn compose_table(child: &JointTable, comp: &Composition, parent: &CodeSpec) -> Result<JointTable> {
    let (mc, kc) = (comp.child_syndrome_bits, comp.child_label_bits);
    let bits = 4 * (mc + kc);
    if bits > MAX_TABLE_BITS {
        return Err(Error::Capacity(format!(
            "full joint table at level {} needs 2^{bits} child assignments",
            parent.level()
        )));
    }
    let m = parent.num_stabilizers();
    let k = parent.num_logicals();
    let syn_rows: Vec<(usize, u64)> = comp
        .syndrome_rows
        .iter()
        .map(|(i, mask)| Ok((*i, to_word(mask)?)))
        .collect::<Result<_>>()?;
    let label_part: Vec<(u64, u64)> = (0u64..1 << (4 * kc))
        .map(|y| {
            let s = comp
                .label_rows
                .iter()
                .fold(0u64, |a, &(i, mask)| a | (parity(y, mask) as u64) << i);
            let l = comp
                .logical_rows
                .iter()
                .enumerate()
                .fold(0u64, |a, (j, &mask)| a | (parity(y, mask) as u64) << j);
            (s, l)
        })
        .collect();
    let (smask, lmask) = ((1u64 << mc) - 1, (1u64 << kc) - 1);
    let mut entries = vec![0.0; 1 << (m + k)];
    for x in 0u64..1 << (4 * mc) {
        let sx = syn_rows
            .iter()
            .fold(0u64, |a, &(i, mask)| a | (parity(x, mask) as u64) << i);
        let rows: [&[f64]; 4] =
            std::array::from_fn(|b| child.row(x >> (b * mc) & smask));
        for (y, &(sy, l)) in label_part.iter().enumerate() {
            let y = y as u64;
            let prob: f64 = (0..4)
                .map(|b| rows[b][(y >> (b * kc) & lmask) as usize])
                .product();
            entries[((sx | sy) << k | l) as usize] += prob;
        }
    }
    let mut table = JointTable {
        level: parent.level(),
        label_bits: k,
        syndrome_bits: m,
        entries,
    };
    table.normalize();
    Ok(table)
}

/// Full `P(raw label, syndrome)` of a code, composed level by level from
/// codes of the same family. Feasible up to level 2.
pub fn joint_table(code: &CodeSpec, p: f64) -> Result<JointTable> {
    check_p(p)?;
    let mut table = base_table(&build_code(code.family(), 1)?, p)?;
    let mut child = build_code(code.family(), 1)?;
    for level in 2..=code.level() {
        let parent = if level == code.level() {
            code.clone()
        } else {
            build_code(code.family(), level)?
        };
        let comp = derive(&parent, &child)?;
        table = compose_table(&table, &comp, &parent)?;
        child = parent;
    }
    Ok(table)
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::Usage(format!("flip probability must lie in [0, 0.5], got {p}")));
    }
    Ok(())
}

/// Per syndrome bit, the raw-label flips of its pure error.
pub(crate) fn pure_error_flips(code: &CodeSpec) -> Vec<u64> {
    code.pure_errors()
        .iter()
        .map(|t| {
            code.z_logicals()
                .iter()
                .enumerate()
                .fold(0u64, |a, (j, z)| a | (t.dot(z) as u64) << j)
        })
        .collect()
}

pub(crate) fn label_offset(flips: &[u64], syndrome: &BitVec) -> u64 {
    syndrome.iter_ones().fold(0, |a, i| a ^ flips[i])
}

#[derive(Clone, Debug)]
struct TopLevel {
    child: JointTable,
    mc: usize,
    kc: usize,
    syn_index: Vec<usize>,
    label_index: Vec<usize>,
    syn_system: AffineSystem,
    syn_kernel: Vec<u64>,
    label_system: AffineSystem,
    /// Kernel elements of the label system with their logical parities.
    label_kernel: Vec<(u64, u64)>,
    logical_rows: Vec<u64>,
}

impl TopLevel {
    fn logical(&self, y: u64) -> u64 {
        self.logical_rows
            .iter()
            .enumerate()
            .fold(0u64, |a, (j, &mask)| a | (parity(y, mask) as u64) << j)
    }

    fn scores(&self, syndrome: &BitVec, k: usize) -> Vec<f64> {
        let mut acc = vec![0.0; 1 << k];
        let gather = |idx: &[usize]| {
            idx.iter()
                .enumerate()
                .fold(0u64, |a, (t, &i)| a | (syndrome.get(i) as u64) << t)
        };
        let (Some(xp), Some(yp)) = (
            self.syn_system.particular(gather(&self.syn_index)),
            self.label_system.particular(gather(&self.label_index)),
        ) else {
            return acc;
        };
        let lp = self.logical(yp);
        let (smask, lmask) = ((1u64 << self.mc) - 1, (1u64 << self.kc) - 1);
        let kc = self.kc;
        for &xk in &self.syn_kernel {
            let x = xp ^ xk;
            let rows: [&[f64]; 4] =
                std::array::from_fn(|b| self.child.row(x >> (b * self.mc) & smask));
            for &(yk, lk) in &self.label_kernel {
                let y = yp ^ yk;
                let prob = rows[0][(y & lmask) as usize]
                    * rows[1][(y >> kc & lmask) as usize]
                    * rows[2][(y >> (2 * kc) & lmask) as usize]
                    * rows[3][(y >> (3 * kc) & lmask) as usize];
                acc[(lp ^ lk) as usize] += prob;
            }
        }
        acc
    }
}

/// Exact MAP decoder for the i.i.d. bit-flip channel, levels 1 to 3.
#[derive(Clone, Debug)]
pub struct BlockMapDecoder {
    level: usize,
    p: f64,
    k: usize,
    flips: Vec<u64>,
    base: Option<JointTable>,
    top: Option<TopLevel>,
}

impl BlockMapDecoder {
    pub const MAX_LEVEL: usize = 3;

    pub fn new(code: &CodeSpec, p: f64) -> Result<Self> {
        check_p(p)?;
        let level = code.level();
        if level > Self::MAX_LEVEL {
            return Err(Error::Capacity(format!(
                "block MAP decoding supports levels up to {}, got {level}",
                Self::MAX_LEVEL
            )));
        }
        let k = code.num_logicals();
        let flips = pure_error_flips(code);
        if level == 1 {
            return Ok(Self {
                level,
                p,
                k,
                flips,
                base: Some(base_table(code, p)?),
                top: None,
            });
        }
        let child_code = build_code(code.family(), level - 1)?;
        let child = joint_table(&child_code, p)?;
        let comp = derive(code, &child_code)?;
        let (mc, kc) = (comp.child_syndrome_bits, comp.child_label_bits);

        let syn_masks: Vec<u64> = comp
            .syndrome_rows
            .iter()
            .map(|(_, m)| to_word(m))
            .collect::<Result<_>>()?;
        let syn_system = AffineSystem::new(&syn_masks, 4 * mc)?;
        let syn_kernel = syn_system.kernel_elements()?;
        let label_masks: Vec<u64> = comp.label_rows.iter().map(|&(_, m)| m).collect();
        let label_system = AffineSystem::new(&label_masks, 4 * kc)?;
        let mut top = TopLevel {
            child,
            mc,
            kc,
            syn_index: comp.syndrome_rows.iter().map(|(i, _)| *i).collect(),
            label_index: comp.label_rows.iter().map(|(i, _)| *i).collect(),
            syn_system,
            syn_kernel,
            label_system,
            label_kernel: Vec::new(),
            logical_rows: comp.logical_rows,
        };
        top.label_kernel = top
            .label_system
            .kernel_elements()?
            .into_iter()
            .map(|y| (y, top.logical(y)))
            .collect();
        Ok(Self {
            level,
            p,
            k,
            flips,
            base: None,
            top: Some(top),
        })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Unnormalized `P(label, syndrome)` for every label.
    pub fn label_scores(&self, syndrome: &BitVec) -> Vec<f64> {
        let raw = match (&self.base, &self.top) {
            (Some(base), _) => base.row(syndrome.to_u64()).to_vec(),
            (None, Some(top)) => top.scores(syndrome, self.k),
            (None, None) => unreachable!("decoder has either a base table or a top level"),
        };
        let offset = label_offset(&self.flips, syndrome);
        (0..raw.len()).map(|l| raw[l ^ offset as usize]).collect()
    }
}

impl Decoder for BlockMapDecoder {
    fn name(&self) -> String {
        "block-map".into()
    }

    fn decode(&self, syndrome: &BitVec) -> DecodeResult {
        let scores = self.label_scores(syndrome);
        let (label, posterior, tie_broken) = argmax_lex(&scores, self.k);
        DecodeResult {
            label: BitVec::from_u64(label, self.k),
            posterior,
            tie_broken,
        }
    }
}
