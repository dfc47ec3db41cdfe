//! Bitstring conventions.
//!
//! A basis state on `n` qubits is written `q0 q1 .. q(n-1)` left to right,
//! and qubit 0 is the most significant bit of the statevector index:
//! `|10>` on two qubits is index 2. All index arithmetic lives here so the
//! convention exists in exactly one place.

/// Bit position (from the least significant end) of qubit `qubit`.
#[inline]
pub fn bit_position(qubit: usize, n: usize) -> usize {
    debug_assert!(qubit < n);
    n - 1 - qubit
}

/// Single-qubit mask for `qubit`.
#[inline]
pub fn qubit_mask(qubit: usize, n: usize) -> usize {
    1 << bit_position(qubit, n)
}

/// Value (0 or 1) of `qubit` in basis index `index`.
#[inline]
pub fn bit(index: usize, qubit: usize, n: usize) -> usize {
    (index >> bit_position(qubit, n)) & 1
}

/// `index` with `qubit` flipped.
#[inline]
pub fn flip(index: usize, qubit: usize, n: usize) -> usize {
    index ^ qubit_mask(qubit, n)
}

/// `index` with `qubit` forced to 0.
#[inline]
pub fn clear(index: usize, qubit: usize, n: usize) -> usize {
    index & !qubit_mask(qubit, n)
}

/// Mask with a 1 at every qubit in `qubits`.
pub fn mask_of<I: IntoIterator<Item = usize>>(qubits: I, n: usize) -> usize {
    qubits.into_iter().fold(0, |m, q| m | qubit_mask(q, n))
}

/// Parity sign `(-1)^popcount(index & mask)`.
#[inline]
pub fn parity_sign(index: usize, mask: usize) -> i32 {
    if (index & mask).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Render `index` as an `n`-character bitstring, qubit 0 first.
pub fn to_bitstring(index: usize, n: usize) -> String {
    (0..n).map(|q| if bit(index, q, n) == 1 { '1' } else { '0' }).collect()
}

/// Parse an `n`-character bitstring written qubit 0 first.
pub fn from_bitstring(s: &str) -> Option<(usize, usize)> {
    let n = s.len();
    if n == 0 || n > usize::BITS as usize - 1 {
        return None;
    }
    let mut index = 0;
    for c in s.chars() {
        index <<= 1;
        match c {
            '0' => {}
            '1' => index |= 1,
            _ => return None,
        }
    }
    Some((index, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_zero_is_most_significant() {
        // |10> on two qubits is index 2.
        assert_eq!(from_bitstring("10"), Some((2, 2)));
        assert_eq!(bit(2, 0, 2), 1);
        assert_eq!(bit(2, 1, 2), 0);
        assert_eq!(to_bitstring(2, 2), "10");
    }

    #[test]
    fn flip_and_clear() {
        let s = from_bitstring("110").unwrap().0;
        assert_eq!(to_bitstring(flip(s, 2, 3), 3), "111");
        assert_eq!(to_bitstring(clear(s, 0, 3), 3), "010");
        assert_eq!(clear(clear(s, 0, 3), 0, 3), clear(s, 0, 3));
    }

    #[test]
    fn parity_over_masks() {
        let m = mask_of([0, 2], 3);
        assert_eq!(parity_sign(from_bitstring("100").unwrap().0, m), -1);
        assert_eq!(parity_sign(from_bitstring("101").unwrap().0, m), 1);
        assert_eq!(parity_sign(0, m), 1);
    }

    #[test]
    fn bitstring_round_trip() {
        for index in 0..32 {
            let s = to_bitstring(index, 5);
            assert_eq!(from_bitstring(&s), Some((index, 5)));
        }
        assert_eq!(from_bitstring("10x"), None);
        assert_eq!(from_bitstring(""), None);
    }
}
