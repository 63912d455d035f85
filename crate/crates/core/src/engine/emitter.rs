use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::archive::{Archive, Genome};
use crate::tasks::GenomeDomain;

/// Gaussian-mutation emitter. Parents are drawn uniformly from the filled
/// cells; an empty archive falls back to uniform sampling of the domain.
pub fn emit_batch<R: Rng + ?Sized>(
    archive: &Archive,
    domain: &GenomeDomain,
    batch_size: usize,
    sigma: f64,
    rng: &mut R,
) -> Vec<Genome> {
    if archive.is_empty() {
        return (0..batch_size).map(|_| Genome::new(domain.sample(rng))).collect();
    }
    let noise = Normal::new(0.0, sigma).expect("sigma is finite and non-negative");
    let elites = archive.elites();
    (0..batch_size)
        .map(|_| {
            let parent = &elites[rng.random_range(0..elites.len())].individual.genome;
            let mut child: Vec<f64> = parent.iter().map(|&v| v + noise.sample(rng)).collect();
            domain.clip(&mut child);
            Genome::new(child)
        })
        .collect()
}
