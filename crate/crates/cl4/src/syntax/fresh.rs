//! Deterministic fresh names. Candidates are enumerated shortest first and
//! alphabetically within a length, and the first unused one is returned.

use std::collections::BTreeSet;

const VAR_HEADS: [char; 6] = ['u', 'v', 'w', 'x', 'y', 'z'];

/// `u`..`z`, optionally followed by decimal digits.
pub fn is_variable_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if VAR_HEADS.contains(&c) => chars.all(|c| c.is_ascii_digit()),
        _ => false,
    }
}

/// Smallest variable name not in `used`: u, v, ..., z, u0, ..., z9, u00, ...
pub fn fresh_variable(used: &BTreeSet<String>) -> String {
    for digits in 0usize.. {
        let count = 10usize.pow(digits as u32);
        for h in VAR_HEADS {
            for n in 0..count {
                let name = if digits == 0 { h.to_string() } else { format!("{h}{n:0digits$}") };
                if !used.contains(&name) {
                    return name;
                }
            }
        }
    }
    unreachable!()
}

/// Smallest lowercase identifier that is not a variable name and not in `used`.
pub fn fresh_elementary_letter(used: &BTreeSet<String>) -> String {
    for len in 1u32.. {
        for mut n in 0..26usize.pow(len) {
            let mut name = vec![b'a'; len as usize];
            for slot in name.iter_mut().rev() {
                *slot = b'a' + (n % 26) as u8;
                n /= 26;
            }
            let name = String::from_utf8(name).expect("ascii");
            if !is_variable_name(&name) && !used.contains(&name) {
                return name;
            }
        }
    }
    unreachable!()
}
