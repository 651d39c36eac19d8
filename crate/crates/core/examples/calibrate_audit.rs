use ped_core::audit::m_exact;
use ped_core::blocks::PseudoParams;
use ped_core::gen::random_text;
use ped_core::meter::WorkMeter;
use ped_core::rng::Prng;
use rayon::prelude::*;

fn main() {
    // Find seeds where the n=2048/B=32 unit-test instance is fully unique.
    let params = PseudoParams::new(4, 32).unwrap();
    for seed in 0..12u64 {
        let mut r = Prng::from_seed(seed);
        let x = random_text(&mut r, 2048, 4);
        let mut m = WorkMeter::new();
        let (mv, _) = m_exact(&x, &params, false, &mut m).unwrap();
        println!("B=32 n=2048 seed {seed}: m={mv}");
    }
    // Re-time criterion 5a scale with the filters in place.
    let t0 = std::time::Instant::now();
    let params5 = PseudoParams::new(4, 24).unwrap();
    let zeros: usize = (0..30u64).into_par_iter().map(|seed| {
        let mut r = Prng::from_seed(seed);
        let x = random_text(&mut r, 3072, 4);
        let mut m = WorkMeter::new();
        let (mv, _) = m_exact(&x, &params5, false, &mut m).unwrap();
        (mv == 0) as usize
    }).sum();
    println!("criterion5a sample: {zeros}/30 zero-mass, elapsed {:?} (filters on)", t0.elapsed());
}
