//! Regenerates `data/ldpc_n256_r05.alist`.
//!
//! cargo run -p wdnoma --example gen_ldpc > crates/core/data/ldpc_n256_r05.alist

use wdnoma::fec::{standard_code_from_seed, STANDARD_SEED};

fn main() {
    let code = standard_code_from_seed(STANDARD_SEED).expect("construction succeeds");
    print!("{}", code.to_alist());
}
