//! Independent homology oracles used to validate the Lambda-algebra engine.
//!
//! Both oracles compute the same Ext dimensions from chain complexes that
//! share no code with the Lambda modules: [`cobar`] works in the reduced
//! cobar complex of the dual Steenrod algebra, and [`minres`] builds a
//! minimal free resolution over the Milnor-basis Steenrod algebra. They also
//! cross-check each other. The cobar complex is exact but its slices grow
//! like 2.2^t (about 10^8 basis elements by t = 24), so it is only usable
//! for small internal degrees; the minimal resolution stays tiny through
//! t = 24 and beyond.
//!
//! The oracles carry their own small dense GF(2) eliminator on purpose: a
//! defect in the main linear algebra cannot silently cancel on both sides of
//! an equivalence check.

pub mod cobar;
pub mod minres;

/// Rank of a GF(2) matrix given as packed rows; self-contained on purpose.
pub(crate) fn gf2_rank(rows: &mut Vec<Vec<u64>>, cols: usize) -> usize {
    let mut rank = 0;
    for c in 0..cols {
        let word = c / 64;
        let mask = 1u64 << (c % 64);
        let Some(src) = (rank..rows.len()).find(|&i| rows[i][word] & mask != 0) else {
            continue;
        };
        rows.swap(rank, src);
        let pivot = std::mem::take(&mut rows[rank]);
        for row in rows.iter_mut().skip(rank + 1) {
            if row[word] & mask != 0 {
                for (a, b) in row.iter_mut().zip(&pivot) {
                    *a ^= b;
                }
            }
        }
        rows[rank] = pivot;
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

pub(crate) fn packed_row(cols: usize) -> Vec<u64> {
    vec![0u64; cols.div_ceil(64)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_small() {
        // {110, 011, 101} has rank 2.
        let mut rows = vec![vec![0b011u64], vec![0b110], vec![0b101]];
        assert_eq!(gf2_rank(&mut rows, 3), 2);
        let mut id = vec![vec![0b001u64], vec![0b010], vec![0b100]];
        assert_eq!(gf2_rank(&mut id, 3), 3);
        let mut zero = vec![vec![0u64]; 4];
        assert_eq!(gf2_rank(&mut zero, 3), 0);
    }

    #[test]
    fn oracles_agree_with_each_other() {
        let max_t = 12;
        let cobar = cobar::cobar_ext_dims(max_t, max_t);
        let minres = minres::minres_ext_dims(max_t, max_t);
        assert_eq!(cobar, minres);
    }
}
