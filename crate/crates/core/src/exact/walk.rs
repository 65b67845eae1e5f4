use crate::increments::LatticeIncrement;

/// Sum with O(log n) error growth.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 64;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let (l, r) = xs.split_at(xs.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

/// Forward stepper for the sub-probability measure `P(x + S_k = w, tau_x > k)`.
///
/// `mass()[w]` is the mass at position `w`. Index 0 is only ever populated at
/// `k = 0` when the walk starts at `x = 0`. After each step the mass that
/// landed on `{<= 0}` is available from [`KilledWalk::last_kill`], indexed by
/// the overshoot `h = -(x + S_k)`.
#[derive(Debug, Clone)]
pub struct KilledWalk<'a> {
    dist: &'a LatticeIncrement,
    steps: usize,
    mass: Vec<f64>,
    next: Vec<f64>,
    kill: Vec<f64>,
    killed_total: f64,
}

impl<'a> KilledWalk<'a> {
    pub fn new(dist: &'a LatticeIncrement, x: u64) -> Self {
        let x = x as usize;
        let mut mass = vec![0.0; x + 1];
        mass[x] = 1.0;
        Self {
            dist,
            steps: 0,
            mass,
            next: Vec::new(),
            kill: vec![0.0; dist.max_down() + 1],
            killed_total: 0.0,
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Current live measure by position, `0..=x + k * max_offset`.
    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn live(&self) -> f64 {
        pairwise_sum(&self.mass)
    }

    /// Mass killed at the latest step, by overshoot `0..=max_down`.
    pub fn last_kill(&self) -> &[f64] {
        &self.kill
    }

    /// Cumulative killed mass `P(tau_x <= k)`.
    pub fn killed_total(&self) -> f64 {
        self.killed_total
    }

    pub fn step(&mut self) {
        let width = self.mass.len() + self.dist.max_up();
        self.next.clear();
        self.next.resize(width, 0.0);
        self.kill.iter_mut().for_each(|v| *v = 0.0);

        for (d, p) in self.dist.iter() {
            // positions w with w + d >= 1 survive
            let first_alive = (1 - d).max(0) as usize;
            if first_alive < self.mass.len() {
                let src = &self.mass[first_alive..];
                let start = (first_alive as i64 + d) as usize;
                let dst = &mut self.next[start..start + src.len()];
                for (t, s) in dst.iter_mut().zip(src) {
                    *t += p * s;
                }
            }
            for w in 0..first_alive.min(self.mass.len()) {
                let h = (-(w as i64) - d) as usize;
                self.kill[h] += p * self.mass[w];
            }
        }
        std::mem::swap(&mut self.mass, &mut self.next);
        self.killed_total += pairwise_sum(&self.kill);
        self.steps += 1;
    }

    pub fn advance(&mut self, k: usize) {
        for _ in 0..k {
            self.step();
        }
    }
}

/// Unkilled walk `x + S_k` on all of `Z`.
#[derive(Debug, Clone)]
pub struct FreeWalk<'a> {
    dist: &'a LatticeIncrement,
    steps: usize,
    lo: i64,
    mass: Vec<f64>,
    next: Vec<f64>,
}

impl<'a> FreeWalk<'a> {
    pub fn new(dist: &'a LatticeIncrement, x: i64) -> Self {
        Self {
            dist,
            steps: 0,
            lo: x,
            mass: vec![1.0],
            next: Vec::new(),
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Lowest position carried by [`FreeWalk::mass`].
    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn pmf(&self, w: i64) -> f64 {
        let i = w - self.lo;
        if i < 0 {
            return 0.0;
        }
        self.mass.get(i as usize).copied().unwrap_or(0.0)
    }

    pub fn step(&mut self) {
        let a = self.dist.max_down();
        let width = self.mass.len() + a + self.dist.max_up();
        self.next.clear();
        self.next.resize(width, 0.0);
        for (d, p) in self.dist.iter() {
            let start = (d + a as i64) as usize;
            let dst = &mut self.next[start..start + self.mass.len()];
            for (t, s) in dst.iter_mut().zip(&self.mass) {
                *t += p * s;
            }
        }
        std::mem::swap(&mut self.mass, &mut self.next);
        self.lo -= a as i64;
        self.steps += 1;
    }

    pub fn advance(&mut self, k: usize) {
        for _ in 0..k {
            self.step();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let v: Vec<f64> = (1..=1000).map(|i| 1.0 / i as f64).collect();
        let naive: f64 = v.iter().sum();
        assert!((pairwise_sum(&v) - naive).abs() < 1e-12);
    }

    #[test]
    fn ssrw_two_steps_from_one() {
        let d = LatticeIncrement::simple();
        let mut w = KilledWalk::new(&d, 1);
        w.step();
        assert_eq!(w.last_kill(), &[0.5, 0.0]);
        w.step();
        assert_eq!(w.mass()[1], 0.25);
        assert_eq!(w.mass()[3], 0.25);
        assert_eq!(w.live(), 0.5);
    }

    #[test]
    fn start_at_zero_is_alive() {
        let d = LatticeIncrement::lazy();
        let mut w = KilledWalk::new(&d, 0);
        assert_eq!(w.live(), 1.0);
        w.step();
        assert_eq!(w.last_kill(), &[0.5, 0.25]);
        assert_eq!(w.live(), 0.25);
    }

    #[test]
    fn free_walk_is_binomial() {
        let d = LatticeIncrement::simple();
        let mut w = FreeWalk::new(&d, 0);
        w.advance(4);
        let expect = [1.0, 4.0, 6.0, 4.0, 1.0].map(|c| c / 16.0);
        for (j, e) in expect.iter().enumerate() {
            assert_eq!(w.pmf(-4 + 2 * j as i64), *e);
            assert_eq!(w.pmf(-3 + 2 * j as i64), 0.0);
        }
    }
}
