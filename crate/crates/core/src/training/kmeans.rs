use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Result of Lloyd's algorithm.
#[derive(Clone, Debug)]
pub struct KMeans {
    pub centroids: Vec<Vec<f64>>,
    pub assignments: Vec<usize>,
    /// Sum of squared distances after every assignment step.
    pub objective_history: Vec<f64>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn assign(points: &[&[f64]], centroids: &[Vec<f64>], assignments: &mut [usize]) -> (bool, f64) {
    let mut changed = false;
    let mut objective = 0.0;
    for (p, a) in points.iter().zip(assignments.iter_mut()) {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (c, centroid) in centroids.iter().enumerate() {
            let d = sq_dist(p, centroid);
            if d < best_d {
                best_d = d;
                best = c;
            }
        }
        if *a != best {
            changed = true;
            *a = best;
        }
        objective += best_d;
    }
    (changed, objective)
}

/// Seeded k-means++ initialization followed by Lloyd iterations.
///
/// An empty cluster is moved onto the point farthest from its centroid, which
/// never increases the objective.
pub fn kmeans(points: &[&[f64]], k: usize, seed: u64, max_iterations: usize) -> KMeans {
    assert!(k > 0 && !points.is_empty(), "k-means needs points and clusters");
    let dim = points[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(k);
    centroids.push(points[rng.random_range(0..points.len())].to_vec());
    let mut nearest: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut idx = points.len() - 1;
            for (i, d) in nearest.iter().enumerate() {
                if u < *d {
                    idx = i;
                    break;
                }
                u -= d;
            }
            idx
        } else {
            rng.random_range(0..points.len())
        };
        centroids.push(points[pick].to_vec());
        for (d, p) in nearest.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, &centroids[centroids.len() - 1]));
        }
    }

    let mut assignments = vec![usize::MAX; points.len()];
    let (_, obj) = assign(points, &centroids, &mut assignments);
    let mut objective_history = vec![obj];
    for _ in 0..max_iterations {
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &a) in points.iter().zip(&assignments) {
            counts[a] += 1;
            for (s, x) in sums[a].iter_mut().zip(p.iter()) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                let (far, _) = points
                    .iter()
                    .enumerate()
                    .map(|(i, p)| (i, sq_dist(p, &centroids[assignments[i]])))
                    .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
                centroids[c] = points[far].to_vec();
                let old = assignments[far];
                counts[old] -= 1;
                counts[c] += 1;
                assignments[far] = c;
            }
        }
        let (changed, obj) = assign(points, &centroids, &mut assignments);
        objective_history.push(obj);
        if !changed {
            break;
        }
    }
    KMeans {
        centroids,
        assignments,
        objective_history,
    }
}
