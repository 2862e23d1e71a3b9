//! Bessel functions of the first kind for integer order.
//!
//! Ascending power series for `x <= 12`, Miller's downward recurrence
//! normalised by `J_0 + 2 sum J_2k = 1` above. Absolute error stays below
//! `1e-12` inside the window `|n| <= 64`, `0 <= x <= 64`.

use crate::error::{Error, Result};

pub const MAX_ORDER: i32 = 64;
pub const MAX_ARGUMENT: f64 = 64.0;

const SERIES_LIMIT: f64 = 12.0;
const RESCALE: f64 = 1e250;

/// `J_n(x)` for integer `n`.
pub fn bessel_j(n: i32, x: f64) -> Result<f64> {
    if n.abs() > MAX_ORDER || !(0.0..=MAX_ARGUMENT).contains(&x) {
        return Err(Error::Domain(format!(
            "bessel_j({n}, {x}) outside |n| <= {MAX_ORDER}, 0 <= x <= {MAX_ARGUMENT}"
        )));
    }
    let order = n.unsigned_abs() as usize;
    let value = if x == 0.0 {
        if order == 0 {
            1.0
        } else {
            0.0
        }
    } else if x <= SERIES_LIMIT {
        series(order, x)
    } else {
        miller(order, x)
    };
    // J_{-n} = (-1)^n J_n
    if n < 0 && order % 2 == 1 {
        Ok(-value)
    } else {
        Ok(value)
    }
}

fn series(n: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for i in 1..=n {
        term *= half / i as f64;
    }
    let q = -half * half;
    let mut sum = term;
    let mut k = 0usize;
    loop {
        k += 1;
        term *= q / (k * (k + n)) as f64;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || term == 0.0 {
            break;
        }
    }
    sum
}

fn miller(n: usize, x: f64) -> f64 {
    let top = n.max(x as usize);
    let mut start = top + 30 + (160.0 * top as f64).sqrt() as usize;
    start += start % 2;

    let two_over_x = 2.0 / x;
    let mut above = 0.0;
    let mut current = 1e-300;
    let mut norm = 0.0;
    let mut wanted = 0.0;
    for k in (1..=start).rev() {
        let below = k as f64 * two_over_x * current - above;
        above = current;
        current = below;
        if current.abs() > RESCALE {
            current /= RESCALE;
            above /= RESCALE;
            norm /= RESCALE;
            wanted /= RESCALE;
        }
        // `current` now holds the unnormalised J_{k-1}
        let index = k - 1;
        if index == n {
            wanted = current;
        }
        if index > 0 && index % 2 == 0 {
            norm += 2.0 * current;
        }
    }
    norm += current;
    wanted / norm
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Reference values from 40-digit arithmetic.
    const REFERENCE: &[(i32, f64, f64)] = &[
    (0, 0.001, 0.9999997500000156),
    (0, 0.5, 0.9384698072408129),
    (0, 1.0, 0.7651976865579666),
    (0, 2.404825557695773, -6.10876525973673e-17),
    (0, 3.8317, -0.4027593956953751),
    (0, 5.3176, -0.06971287517872858),
    (0, 7.5, 0.2663396578803784),
    (0, 11.99, 0.045451560352858605),
    (0, 12.01, 0.049920430319825355),
    (0, 15.0, -0.014224472826780772),
    (0, 20.0, 0.16702466434058316),
    (0, 33.3, 0.06333848594752126),
    (0, 47.0, -0.07124878990180619),
    (0, 64.0, 0.09259001221604811),
    (1, 0.001, 0.0004999999375000026),
    (1, 0.5, 0.2422684576748739),
    (1, 1.0, 0.4400505857449335),
    (1, 2.404825557695773, 0.5191474972894667),
    (1, 3.8317, 2.404559043103632e-06),
    (1, 5.3176, -0.3460941805682659),
    (1, 7.5, 0.1352484275797055),
    (1, 11.99, -0.22409937126624863),
    (1, 12.01, -0.2227732009297032),
    (1, 15.0, 0.20510403861352275),
    (1, 20.0, 0.06683312417585005),
    (1, 33.3, 0.12386214790148009),
    (1, 47.0, 0.09126876424000789),
    (1, 64.0, 0.037791549354396374),
    (2, 0.001, 1.2499998958333365e-07),
    (2, 0.5, 0.03060402345868264),
    (2, 1.0, 0.11490348493190047),
    (2, 2.404825557695773, 0.4317548070196804),
    (2, 3.8317, 0.4027606507826957),
    (2, 5.3176, -0.0604564420201077),
    (2, 7.5, -0.23027341052579026),
    (2, 11.99, -0.08283260643563568),
    (2, 12.01, -0.08701838218155777),
    (2, 15.0, 0.04157167797525047),
    (2, 20.0, -0.16034135192299814),
    (2, 33.3, -0.055899317905390315),
    (2, 47.0, 0.07513256710350866),
    (2, 64.0, -0.09140902629872323),
    (3, 0.001, 2.0833332031250035e-11),
    (3, 0.5, 0.002563729994587244),
    (3, 1.0, 0.019563353982668407),
    (3, 2.404825557695773, 0.19899990535769083),
    (3, 3.8317, 0.42044872760965035),
    (3, 5.3176, 0.3006176934160862),
    (3, 7.5, -0.2580609131934603),
    (3, 11.99, 0.19646547420682053),
    (3, 12.01, 0.1937912251823068),
    (3, 15.0, -0.19401825782012264),
    (3, 20.0, -0.09890139456044968),
    (3, 33.3, -0.13057678068290834),
    (3, 47.0, -0.08487450320992204),
    (3, 64.0, -0.04350461349806658),
    (4, 0.001, 2.604166536458336e-15),
    (4, 0.5, 0.0001607364763642876),
    (4, 1.0, 0.0024766389641099553),
    (4, 2.404825557695773, 0.06474666616417797),
    (4, 3.8317, 0.25561353447656315),
    (4, 5.3176, 0.39965197393234575),
    (4, 7.5, 0.023824679971022014),
    (4, 11.99, 0.1811472724273724),
    (4, 12.01, 0.1838333156614779),
    (4, 15.0, -0.11917898110329952),
    (4, 20.0, 0.13067093355486326),
    (4, 33.3, 0.03237197003459601),
    (4, 47.0, -0.08596761006647742),
    (4, 64.0, 0.08733046878327949),
    (5, 0.001, 2.6041665581597246e-19),
    (5, 0.5, 8.053627241357474e-06),
    (5, 1.0, 0.00024975773021123444),
    (5, 2.404825557695773, 0.01638924320480585),
    (5, 3.8317, 0.11323300003408611),
    (5, 5.3176, 0.3006339598595958),
    (5, 7.5, 0.28347390516255044),
    (5, 11.99, -0.07559990461391151),
    (5, 12.01, -0.07133772599064789),
    (5, 15.0, 0.13045613456502955),
    (5, 20.0, 0.15116976798239498),
    (5, 33.3, 0.13835383054106956),
    (5, 47.0, 0.07024171851775567),
    (5, 64.0, 0.054420922095976515),
    (7, 0.001, 1.5500991579086071e-27),
    (7, 0.5, 1.2015867327763022e-08),
    (7, 1.0, 1.5023258174368083e-06),
    (7, 2.404825557695773, 0.000600688365732954),
    (7, 3.8317, 0.01173340983318096),
    (7, 5.3176, 0.07330428839436491),
    (7, 7.5, 0.2831509378972553),
    (7, 11.99, -0.16880350155038387),
    (7, 12.01, -0.1716916713268106),
    (7, 15.0, 0.03446365541895916),
    (7, 20.0, -0.18422139772059443),
    (7, 33.3, -0.13504726231599423),
    (7, 47.0, -0.04447678492806624),
    (7, 64.0, -0.06920102204081086),
    (10, 0.001, 2.6911443943049994e-40),
    (10, 0.5, 2.6131773608228033e-13),
    (10, 1.0, 2.6306151236874534e-10),
    (10, 2.404825557695773, 1.5253656039281561e-06),
    (10, 3.8317, 0.00013087283247194604),
    (10, 5.3176, 0.0025117562714850475),
    (10, 7.5, 0.03899825788941221),
    (10, 11.99, 0.3006716894944952),
    (10, 12.01, 0.30027136666858933),
    (10, 15.0, -0.09007181104765906),
    (10, 20.0, 0.1864825580239451),
    (10, 33.3, 0.12182178268240793),
    (10, 47.0, 0.11631089064044882),
    (10, 64.0, -0.03974852239468084),
    (16, 0.001, 7.292903537141352e-67),
    (16, 0.5, 1.108724669876416e-23),
    (16, 1.0, 7.186396586807493e-19),
    (16, 2.404825557695773, 8.3794319079439e-13),
    (16, 3.8317, 1.2671399146679376e-09),
    (16, 5.3176, 1.957069552546188e-07),
    (16, 7.5, 3.132235039819239e-05),
    (16, 11.99, 0.013862320435378815),
    (16, 12.01, 0.014121471107233182),
    (16, 15.0, 0.11617274641649449),
    (16, 20.0, 0.14517984041982906),
    (16, 33.3, 0.04410148370873932),
    (16, 47.0, 0.03168128443681399),
    (16, 64.0, -0.07412839767101445),
    (24, 0.001, 9.606704443566462e-104),
    (24, 0.5, 5.711744202568031e-39),
    (24, 1.0, 9.511097932712494e-32),
    (24, 2.404825557695773, 1.2689258794291376e-22),
    (24, 3.8317, 8.318140864333056e-18),
    (24, 5.3176, 1.8891577512136293e-14),
    (24, 7.5, 5.458021241610778e-11),
    (24, 11.99, 1.7032262480271196e-06),
    (24, 12.01, 1.7637209702417142e-06),
    (24, 15.0, 0.00015266957347290217),
    (24, 20.0, 0.019929106196554407),
    (24, 33.3, -0.12023540771135172),
    (24, 47.0, -0.07555493365619709),
    (24, 64.0, 0.022886800952855234),
    (32, 0.001, 8.848474188856565e-142),
    (32, 0.5, 2.0562976542314625e-55),
    (32, 1.0, 8.781686222395147e-46),
    (32, 2.404825557695773, 1.3258772457998554e-33),
    (32, 3.8317, 3.6898768069073205e-27),
    (32, 5.3176, 1.1924500351149742e-22),
    (32, 7.5, 5.788701001048881e-18),
    (32, 11.99, 9.731658204025861e-12),
    (32, 12.01, 1.022623760943994e-11),
    (32, 15.0, 6.6318139508084504e-09),
    (32, 20.0, 1.574125735189643e-05),
    (32, 33.3, 0.18805085770660726),
    (32, 47.0, 0.06803898731093053),
    (32, 64.0, -0.06953219304899973),
    (48, 0.001, 2.8618799879793775e-220),
    (48, 0.5, 1.0154479660599862e-90),
    (48, 1.0, 2.847315017992933e-76),
    (48, 2.404825557695773, 5.443084841785803e-58),
    (48, 3.8317, 2.672310505066461e-48),
    (48, 5.3176, 1.691441911071119e-41),
    (48, 7.5, 2.1606955001037185e-34),
    (48, 11.99, 8.299421849455988e-25),
    (48, 12.01, 8.968333156201492e-25),
    (48, 15.0, 2.538499406442115e-20),
    (48, 20.0, 1.0014853760018218e-14),
    (48, 33.3, 8.16068623911383e-06),
    (48, 47.0, 0.0929191147027794),
    (48, 64.0, 0.10364597933792095),
    (64, 0.001, 4.272316107095984e-301),
    (64, 0.5, 2.313801316194194e-128),
    (64, 1.0, 4.255915220948966e-109),
    (64, 2.404825557695773, 1.0241198245665479e-84),
    (64, 3.8317, 8.773738017033119e-72),
    (64, 5.3176, 1.0695333736040923e-62),
    (64, 7.5, 3.4711360312336805e-53),
    (64, 11.99, 2.716078909194369e-40),
    (64, 12.01, 3.016188796673282e-40),
    (64, 15.0, 3.327857998599669e-34),
    (64, 20.0, 1.6611215152065e-26),
    (64, 33.3, 1.4100047400797477e-13),
    (64, 47.0, 4.61497419312996e-06),
    (64, 64.0, 0.11182097665288254),
    ];

    /// Independent oracle: the ascending series summed longhand.
    fn series_oracle(n: usize, x: f64) -> f64 {
        let mut total = 0.0;
        for k in 0..60usize {
            let mut term = if k % 2 == 0 { 1.0 } else { -1.0 };
            for i in 1..=k {
                term *= 0.5 * x / i as f64;
            }
            for i in 1..=(k + n) {
                term *= 0.5 * x / i as f64;
            }
            total += term;
        }
        total
    }

    #[test]
    fn trivial_values() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(5, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j(-4, 1.3).unwrap(), bessel_j(4, 1.3).unwrap());
    }

    #[test]
    fn first_zero_of_j1_gives_j0_minimum() {
        let v = bessel_j(0, 3.8317).unwrap();
        assert!((v - series_oracle(0, 3.8317)).abs() < 1e-13);
        assert!((v + 0.4028).abs() < 5e-5);
    }

    #[test]
    fn matches_high_precision_reference() {
        for &(n, x, want) in REFERENCE {
            let got = bessel_j(n, x).unwrap();
            assert!((got - want).abs() <= 1e-12, "J_{n}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn series_and_miller_agree_at_crossover() {
        for n in 0..=40 {
            for &x in &[9.0, 11.0, 12.0] {
                let a = series(n, x);
                let b = miller(n, x);
                assert!((a - b).abs() < 1e-12, "n={n} x={x}: {a} vs {b}");
                assert!((a - series_oracle(n, x)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn recurrence_holds() {
        for &x in &[0.7, 5.5, 13.0, 30.0, 63.0] {
            for n in 1..60 {
                let lhs = bessel_j(n - 1, x).unwrap() + bessel_j(n + 1, x).unwrap();
                let rhs = 2.0 * n as f64 / x * bessel_j(n, x).unwrap();
                assert!((lhs - rhs).abs() < 1e-11, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn rejects_out_of_window() {
        assert!(matches!(bessel_j(65, 1.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_j(0, 64.5), Err(Error::Domain(_))));
        assert!(matches!(bessel_j(0, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn closure_sum_of_squares() {
        for i in 0..=64 {
            let x = 16.0 * i as f64 / 64.0;
            let s: f64 = (-64..=64).map(|n| bessel_j(n, x).unwrap().powi(2)).sum();
            assert!(s >= 1.0 - 1e-10 && s <= 1.0 + 1e-12, "x={x}: {s}");
        }
    }

    proptest! {
        #[test]
        fn parity(n in 0i32..=64, x in 0.0f64..64.0) {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let d = bessel_j(-n, x).unwrap() - sign * bessel_j(n, x).unwrap();
            prop_assert!(d.abs() <= 1e-12);
        }
    }
}
