use rand::Rng;

use super::config::Dims;

/// One ±1 spreading sequence of length `N_c` per user.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadingCodes {
    pub codes: Vec<Vec<f64>>,
}

impl SpreadingCodes {
    pub fn num_users(&self) -> usize {
        self.codes.len()
    }
}

pub fn generate_spreading_codes<R: Rng + ?Sized>(dims: &Dims, rng: &mut R) -> SpreadingCodes {
    let codes = (0..dims.k)
        .map(|_| {
            (0..dims.n_c)
                .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
                .collect()
        })
        .collect();
    SpreadingCodes { codes }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::uwb::SystemConfig;

    #[test]
    fn reproducible_and_binary() {
        let mut cfg = SystemConfig::desk(2, 10.0);
        cfg.spreading_gain = 4;
        cfg.symbol_duration = 4.0 * cfg.chip_duration;
        let dims = cfg.dims().unwrap();
        let a = generate_spreading_codes(&dims, &mut ChaCha8Rng::seed_from_u64(5));
        let b = generate_spreading_codes(&dims, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a, b);
        assert_eq!(a.codes.len(), 2);
        assert!(a.codes.iter().all(|c| c.len() == 4 && c.iter().all(|e| e * e == 1.0)));
    }

    #[test]
    fn balanced_on_average() {
        let mut cfg = SystemConfig::full_scale(8, 10.0);
        cfg.seed = 0;
        let dims = cfg.dims().unwrap();
        let n = (dims.k * dims.n_c) as f64;
        let seeds = 400;
        let mut total = 0.0;
        let mut inside = 0;
        for s in 0..seeds {
            let codes = generate_spreading_codes(&dims, &mut ChaCha8Rng::seed_from_u64(s));
            let mean: f64 = codes.codes.iter().flatten().sum::<f64>() / n;
            if mean.abs() <= 3.0 / n.sqrt() {
                inside += 1;
            }
            total += mean;
        }
        // 3-sigma binomial band holds for ~99.7% of draws.
        assert!(inside as f64 >= 0.98 * seeds as f64);
        assert!((total / seeds as f64).abs() < 3.0 / (n * seeds as f64).sqrt());
    }
}
