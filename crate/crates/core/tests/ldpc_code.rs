use wdnoma::fec::{ldpc_encode, standard_code_from_seed, LdpcCode, STANDARD_SEED};
use wdnoma::numerics::SimRng;

#[test]
fn shipped_code_is_reproducible() {
    let shipped = include_str!("../data/ldpc_n256_r05.alist");
    let rebuilt = standard_code_from_seed(STANDARD_SEED).unwrap();
    assert_eq!(rebuilt.to_alist(), shipped);
    assert_eq!(LdpcCode::standard().check_adjacency(), rebuilt.check_adjacency());
    assert_eq!(LdpcCode::standard().info_positions(), rebuilt.info_positions());
}

/// Parity checked against a dense H written out from the alist text alone.
#[test]
fn codewords_satisfy_dense_parity_matrix() {
    let text = include_str!("../data/ldpc_n256_r05.alist");
    let mut nums = text.split_whitespace().map(|t| t.parse::<usize>().unwrap());
    let n = nums.next().unwrap();
    let m = nums.next().unwrap();
    let _max_col = nums.next().unwrap();
    let _max_row = nums.next().unwrap();
    let col_deg: Vec<usize> = (0..n).map(|_| nums.next().unwrap()).collect();
    let _row_deg: Vec<usize> = (0..m).map(|_| nums.next().unwrap()).collect();
    let mut dense = vec![vec![0u8; n]; m];
    let max_col = *col_deg.iter().max().unwrap();
    for (v, &deg) in col_deg.iter().enumerate() {
        for j in 0..max_col {
            let idx = nums.next().unwrap();
            if j < deg && idx > 0 {
                dense[idx - 1][v] = 1;
            }
        }
    }
    assert_eq!((n, m), (256, 128));
    let code = LdpcCode::standard();
    let mut rng = SimRng::new(31);
    for _ in 0..200 {
        let c = ldpc_encode(&rng.bits(code.k()), code).unwrap();
        for row in &dense {
            let parity = row.iter().zip(&c).fold(0u8, |acc, (h, x)| acc ^ (h & x));
            assert_eq!(parity, 0);
        }
    }
}
