#![no_main]

use std::sync::OnceLock;

use binomcensus_core::ff::FieldCtx;
use libfuzzer_sys::fuzz_target;

fn fields() -> &'static [FieldCtx] {
    static FIELDS: OnceLock<Vec<FieldCtx>> = OnceLock::new();
    FIELDS.get_or_init(|| {
        [(2, 4), (3, 2), (5, 1), (7, 2), (2, 6)]
            .iter()
            .map(|&(p, e)| FieldCtx::new(p, e).unwrap())
            .collect()
    })
}

// First byte picks the field; the rest are little-endian u16 coefficients.
fuzz_target!(|data: &[u8]| {
    let Some((&pick, rest)) = data.split_first() else { return };
    let ctx = &fields()[pick as usize % fields().len()];
    let coeffs: Vec<u32> = rest
        .chunks_exact(2)
        .map(|c| u16::from_le_bytes([c[0], c[1]]) as u32)
        .collect();
    if let Ok(a) = ctx.element(&coeffs) {
        assert_eq!(ctx.coefficients(a), coeffs);
        if let Ok(inv) = ctx.inv(a) {
            assert_eq!(ctx.mul(a, inv), ctx.one());
        }
    }
});
