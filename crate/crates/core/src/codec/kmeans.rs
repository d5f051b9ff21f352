//! Lloyd's k-means with k-means++ seeding on 2-d points, used by the
//! digitization stage. Seeded explicitly so runs are reproducible.

use rand::Rng;

const MAX_ITER: usize = 300;

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

fn nearest(centers: &[[f64; 2]], p: [f64; 2]) -> (usize, f64) {
    let mut best = 0;
    let mut best_d = dist2(centers[0], p);
    for (j, c) in centers.iter().enumerate().skip(1) {
        let d = dist2(*c, p);
        if d < best_d {
            best_d = d;
            best = j;
        }
    }
    (best, best_d)
}

fn seed_centers<R: Rng>(points: &[[f64; 2]], k: usize, rng: &mut R) -> Vec<[f64; 2]> {
    let n = points.len();
    let mut centers = Vec::with_capacity(k);
    centers.push(points[rng.gen_range(0..n)]);
    while centers.len() < k {
        let d2: Vec<f64> = points.iter().map(|&p| nearest(&centers, p).1).collect();
        let total: f64 = d2.iter().sum();
        if total <= 0.0 {
            // all remaining points coincide with a center
            centers.push(points[rng.gen_range(0..n)]);
            continue;
        }
        let mut target = rng.gen::<f64>() * total;
        let mut chosen = n - 1;
        for (i, &d) in d2.iter().enumerate() {
            target -= d;
            if target <= 0.0 {
                chosen = i;
                break;
            }
        }
        centers.push(points[chosen]);
    }
    centers
}

/// Runs Lloyd's algorithm and returns per-point assignments. Cluster
/// indices with no members can appear when `k` exceeds the number of
/// distinct points; callers compact them away.
pub fn kmeans<R: Rng>(points: &[[f64; 2]], k: usize, rng: &mut R) -> Vec<usize> {
    assert!(k >= 1 && !points.is_empty());
    let k = k.min(points.len());
    let mut centers = seed_centers(points, k, rng);
    let mut assign = vec![0usize; points.len()];
    for iter in 0..MAX_ITER {
        let mut changed = false;
        for (i, &p) in points.iter().enumerate() {
            let (j, _) = nearest(&centers, p);
            if assign[i] != j || iter == 0 {
                assign[i] = j;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![[0.0f64; 2]; k];
        let mut counts = vec![0usize; k];
        for (i, &p) in points.iter().enumerate() {
            sums[assign[i]][0] += p[0];
            sums[assign[i]][1] += p[1];
            counts[assign[i]] += 1;
        }
        for j in 0..k {
            if counts[j] > 0 {
                centers[j] = [sums[j][0] / counts[j] as f64, sums[j][1] / counts[j] as f64];
            }
        }
    }
    assign
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn separates_two_point_masses() {
        let mut points = Vec::new();
        for i in 0..10 {
            points.push([0.0, 1.0]);
            points.push([0.0, -1.0]);
            let _ = i;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let assign = kmeans(&points, 2, &mut rng);
        // alternating points land in alternating clusters
        for pair in assign.chunks(2) {
            assert_ne!(pair[0], pair[1]);
        }
        assert_eq!(assign[0], assign[2]);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let points: Vec<[f64; 2]> = (0..40)
            .map(|i| [(i % 7) as f64 * 0.3, ((i * 13) % 11) as f64 - 5.0])
            .collect();
        let a = kmeans(&points, 4, &mut ChaCha8Rng::seed_from_u64(9));
        let b = kmeans(&points, 4, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn k_capped_at_point_count() {
        let points = vec![[1.0, 1.0], [2.0, 2.0]];
        let assign = kmeans(&points, 5, &mut ChaCha8Rng::seed_from_u64(1));
        assert!(assign.iter().all(|&a| a < 2));
    }
}
