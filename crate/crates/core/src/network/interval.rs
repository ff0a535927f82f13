//! Interval bound propagation over the unit cube.

use super::Network;

/// Upper bound on `max_j sup_{x ∈ [0,1]^{p_0}} |f_j(x)|`.
pub(super) fn unit_cube_sup(net: &Network) -> f64 {
    let mut lo = vec![0.0; net.input_dim()];
    let mut hi = vec![1.0; net.input_dim()];
    for (i, w) in net.weights().iter().enumerate() {
        let (mut nlo, mut nhi) = (vec![0.0; w.nrows()], vec![0.0; w.nrows()]);
        for r in 0..w.nrows() {
            let (mut a, mut b) = (0.0, 0.0);
            for c in 0..w.ncols() {
                let v = w[(r, c)];
                if v >= 0.0 {
                    a += v * lo[c];
                    b += v * hi[c];
                } else {
                    a += v * hi[c];
                    b += v * lo[c];
                }
            }
            if i < net.depth() {
                let shift = net.biases()[i][r];
                a = (a - shift).max(0.0);
                b = (b - shift).max(0.0);
            }
            nlo[r] = a;
            nhi[r] = b;
        }
        lo = nlo;
        hi = nhi;
    }
    lo.iter().zip(&hi).fold(0.0_f64, |acc, (a, b)| acc.max(a.abs()).max(b.abs()))
}

#[cfg(test)]
mod tests {
    use crate::network::{Architecture, Network};
    use crate::rng;
    use rand::Rng;

    #[test]
    fn bound_dominates_samples() {
        let mut rng = rng::stream(21, 0);
        for _ in 0..10 {
            let net = Network::random(Architecture::new(vec![3, 6, 5, 2]).unwrap(), &mut rng).unwrap();
            let ub = net.sup_norm_upper();
            for _ in 0..2000 {
                let x: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
                assert!(net.eval(&x).unwrap().amax() <= ub + 1e-12);
            }
        }
    }

    #[test]
    fn tight_for_identity() {
        assert_eq!(Network::identity(4).sup_norm_upper(), 1.0);
    }
}
