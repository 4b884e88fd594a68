//! Level-by-level minimum-distance decoding for the original concatenated
//! codes.
//!
//! Every block reports, for each value of its logical label, the least
//! physical weight that produces its local syndrome with that label. A parent
//! treats the four child labels as symbols, keeps the symbol combinations
//! allowed by its own stabilizers and adds the child weights, so the cost of
//! each parent label is the distance to the nearest consistent correction.

use crate::code::{build_original_code, CodeSpec, Family};
use crate::error::{Error, Result};
use crate::gf2::BitVec;

use super::blockmap::{label_offset, pure_error_flips};
use super::compose::{derive, parity, to_word, AffineSystem};
use super::{argmin_lex, DecodeResult, Decoder};

const INF: u32 = u32::MAX / 8;

#[derive(Clone, Debug)]
struct LevelStep {
    /// For each child block, the parent stabilizer index carrying each child
    /// syndrome bit.
    routing: [Vec<usize>; 4],
    kc: usize,
    label_index: Vec<usize>,
    label_system: AffineSystem,
    /// Homogeneous solutions with their logical parities.
    label_kernel: Vec<(u64, u64)>,
    logical_rows: Vec<u64>,
}

impl LevelStep {
    fn new(parent: &CodeSpec, child: &CodeSpec) -> Result<Self> {
        let comp = derive(parent, child)?;
        let mc = comp.child_syndrome_bits;
        let mut routing: [Vec<usize>; 4] = std::array::from_fn(|_| vec![usize::MAX; mc]);
        for (i, mask) in &comp.syndrome_rows {
            let bits: Vec<usize> = mask.iter_ones().collect();
            let &[bit] = bits.as_slice() else {
                return Err(Error::Consistency(format!(
                    "parent stabilizer {i} is not inherited from a single child stabilizer"
                )));
            };
            routing[bit / mc][bit % mc] = *i;
        }
        if routing.iter().flatten().any(|&i| i == usize::MAX) {
            return Err(Error::Consistency(
                "some child stabilizer is not inherited by the parent".into(),
            ));
        }
        let masks: Vec<u64> = comp.label_rows.iter().map(|&(_, m)| m).collect();
        let kc = comp.child_label_bits;
        let label_system = AffineSystem::new(&masks, 4 * kc)?;
        let logical = |y: u64| {
            comp.logical_rows
                .iter()
                .enumerate()
                .fold(0u64, |a, (j, &m)| a | (parity(y, m) as u64) << j)
        };
        let label_kernel = label_system
            .kernel_elements()?
            .into_iter()
            .map(|y| (y, logical(y)))
            .collect();
        Ok(Self {
            routing,
            kc,
            label_index: comp.label_rows.iter().map(|&(i, _)| i).collect(),
            label_system,
            label_kernel,
            logical_rows: comp.logical_rows,
        })
    }

    fn logical(&self, y: u64) -> u64 {
        self.logical_rows
            .iter()
            .enumerate()
            .fold(0u64, |a, (j, &m)| a | (parity(y, m) as u64) << j)
    }
}

/// Level-by-level minimum-distance decoder, levels 1 to 3.
#[derive(Clone, Debug)]
pub struct MdDecoder {
    level: usize,
    k: usize,
    flips: Vec<u64>,
    /// `base[s][l]`: least weight of a level-1 pattern with syndrome `s`
    /// and raw label `l`.
    base: Vec<[u32; 4]>,
    /// `steps[j]` combines level `j+1` blocks into a level `j+2` block.
    steps: Vec<LevelStep>,
}

impl MdDecoder {
    pub const MAX_LEVEL: usize = 3;

    pub fn new(code: &CodeSpec) -> Result<Self> {
        if code.family() != Family::Original {
            return Err(Error::Usage(
                "the minimum-distance decoder needs the original code family".into(),
            ));
        }
        let level = code.level();
        if level > Self::MAX_LEVEL {
            return Err(Error::Capacity(format!(
                "minimum-distance decoding supports levels up to {}, got {level}",
                Self::MAX_LEVEL
            )));
        }
        let one = build_original_code(1)?;
        let zs = to_word(&one.z_stabilizers()[0])?;
        let zl: Vec<u64> = one.z_logicals().iter().map(to_word).collect::<Result<_>>()?;
        let mut base = vec![[INF; 4]; 2];
        for e in 0u64..16 {
            let s = parity(e, zs) as usize;
            let l = parity(e, zl[0]) as usize | (parity(e, zl[1]) as usize) << 1;
            base[s][l] = base[s][l].min(e.count_ones());
        }
        let mut steps = Vec::new();
        let mut child = one;
        for lv in 2..=level {
            let parent = if lv == level {
                code.clone()
            } else {
                build_original_code(lv)?
            };
            steps.push(LevelStep::new(&parent, &child)?);
            child = parent;
        }
        Ok(Self {
            level,
            k: code.num_logicals(),
            flips: pure_error_flips(code),
            base,
            steps,
        })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// Least weight per raw label for a block at `level` whose syndrome bits
    /// are `syndrome`.
    fn costs(&self, level: usize, syndrome: &[bool]) -> Vec<u32> {
        if level == 1 {
            return self.base[syndrome[0] as usize].to_vec();
        }
        let step = &self.steps[level - 2];
        let children: Vec<Vec<u32>> = step
            .routing
            .iter()
            .map(|idx| {
                let s: Vec<bool> = idx.iter().map(|&i| syndrome[i]).collect();
                self.costs(level - 1, &s)
            })
            .collect();
        let k = step.logical_rows.len();
        let mut out = vec![INF; 1 << k];
        let target = step
            .label_index
            .iter()
            .enumerate()
            .fold(0u64, |a, (t, &i)| a | (syndrome[i] as u64) << t);
        let Some(yp) = step.label_system.particular(target) else {
            return out;
        };
        let lp = step.logical(yp);
        let (kc, lmask) = (step.kc, (1u64 << step.kc) - 1);
        for &(yk, lk) in &step.label_kernel {
            let y = yp ^ yk;
            let total = (0..4)
                .map(|b| children[b][(y >> (b * kc) & lmask) as usize])
                .sum::<u32>()
                .min(INF);
            let slot = &mut out[(lp ^ lk) as usize];
            *slot = (*slot).min(total);
        }
        out
    }

    /// Least correction weight for each label.
    pub fn label_costs(&self, syndrome: &BitVec) -> Vec<u32> {
        let raw = self.costs(self.level, &syndrome.to_bools());
        let offset = label_offset(&self.flips, syndrome) as usize;
        (0..raw.len()).map(|l| raw[l ^ offset]).collect()
    }
}

impl Decoder for MdDecoder {
    fn name(&self) -> String {
        "md".into()
    }

    fn decode(&self, syndrome: &BitVec) -> DecodeResult {
        let (label, tie_broken) = argmin_lex(&self.label_costs(syndrome), self.k);
        DecodeResult {
            label: BitVec::from_u64(label, self.k),
            posterior: None,
            tie_broken,
        }
    }
}
