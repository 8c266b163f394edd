//! The adding machine on a `d`-ary tree.

use std::sync::Arc;

use crate::perm::{Permutation, Portrait};
use crate::tree::TreeSignature;

/// Adds one to the first letter of every word, carrying into the next.
pub fn odometer(sig: &Arc<TreeSignature>) -> Portrait {
    let n = sig.horizon();
    let leaves = sig.level_size(n).unwrap() as usize;
    let mut images = Vec::with_capacity(leaves);
    for i in 0..leaves {
        let mut word = sig.vertex_at(n, i).word().to_vec();
        for (k, letter) in word.iter_mut().enumerate() {
            *letter += 1;
            if *letter < sig.degree(k + 1) {
                break;
            }
            *letter = 0;
        }
        images.push(sig.index_of(&crate::tree::VertexAddress::new(word)) as u32);
    }
    let perm = Permutation::from_images(images).expect("odometer permutes leaves");
    Portrait::from_leaf_action(Arc::clone(sig), &perm).expect("odometer preserves the tree")
}
