//! Reference values computed at 40 significant digits with mpmath by
//! `tests/data/gen_oracle.py`, rounded to 20 digits.
#![allow(dead_code, clippy::excessive_precision)]

pub const LN_GAMMA_NEG_HALF: f64 = 1.2655121234846453965;
pub const GAMMA_RATIO_2P4_0P7: f64 = 0.95694637452067207379;
/// `Q(r = 1.7, p = 1.7)` at `γ = 0.7`, i.e. `Γ(3.4)/Γ(1.7)`.
pub const Q_0P7_1P7_1P7: f64 = 3.2809589983565899673;

/// `(x, ln|Γ(x)|, sign Γ(x))`.
pub const LN_GAMMA: [(f64, f64, i8); 10] = [
    (0.1, 2.2527126517342059599, 1),
    (0.5, 0.57236494292470008707, 1),
    (1.5, -0.12078223763524522235, 1),
    (2.5, 0.28468287047291915963, 1),
    (7.25, 7.0521854507385394449, 1),
    (33.3, 82.603723581654952928, 1),
    (171.5, 709.14316303092824227, 1),
    (-0.3, 1.464840050857602507, -1),
    (-1.7, 0.92184468769463750436, 1),
    (-4.5, -2.8130840817693161197, -1),
];

pub const INV_SQRT_PI: f64 = 0.56418958354775628695;
pub const BESSEL_NU_MIN: f64 = 0.84628437532163443042;
pub const SINGLE_HALF_BOUND: f64 = 1.3761263890318375246;
pub const BESSEL_UNIQUENESS_B1: f64 = 3.2835868901671885071;

pub const BESSEL_ROOT_NU_2: f64 = 2.19951508831370936;
pub const BESSEL_ROOT_NU_3P5: f64 = 4.3181429500658395009;

/// `1.2·Σ 2ⁿx^(0.7+1.7n)/Γ(1.7+1.7n) + 1.5·Σ 2ⁿx^(−0.3+1.7n)/Γ(0.7+1.7n)`.
pub const TWO_ROOT_CLOSED_FORM: [(f64, f64); 20] = [
    (0.1, 2.6692489569597218096),
    (0.2, 2.5778044619362590897),
    (0.3, 2.7420081822332189494),
    (0.4, 3.0327683127053686349),
    (0.5, 3.4215978518119137571),
    (0.6, 3.9036118975739526743),
    (0.7, 4.4832375330119952239),
    (0.8, 5.1701407567286721531),
    (0.9, 5.9778794763849863749),
    (1.0, 6.9235247032262661847),
    (1.1, 8.0277124600551298907),
    (1.2, 9.3149341794409194119),
    (1.3, 10.813991867580617156),
    (1.4, 12.558591635269896604),
    (1.5, 14.588070942900370911),
    (1.6, 16.948266549138626288),
    (1.7, 19.692537596990718748),
    (1.8, 22.88296400604202124),
    (1.9, 26.591745523392024821),
    (2.0, 30.90283201933466197),
];

/// `(1/√π)·x^(−0.5)·E_(0.5, 2.4, 0.4)(λ x^1.2)` for `λ = 0.5`.
pub const KS_LAMBDA_0P5: [(f64, f64); 20] = [
    (0.1, 1.842240772180237667),
    (0.2, 1.3586994230088470175),
    (0.3, 1.1632880159212621002),
    (0.4, 1.0608195507222918886),
    (0.5, 1.0027430048558000535),
    (0.6, 0.97062886215685299756),
    (0.7, 0.95589561921069198051),
    (0.8, 0.95406632755277415752),
    (0.9, 0.96266886975498888054),
    (1.0, 0.98033476351809384327),
    (1.1, 1.0063684388503343002),
    (1.2, 1.0405265058976875021),
    (1.3, 1.082900841978409731),
    (1.4, 1.1338578731566557144),
    (1.5, 1.1940111739283418447),
    (1.6, 1.2642159508084047347),
    (1.7, 1.3455797170677688975),
    (1.8, 1.4394866057408744902),
    (1.9, 1.5476346750083860199),
    (2.0, 1.6720868866808279681),
];

/// Same for `λ = 1`.
pub const KS_LAMBDA_1: [(f64, f64); 20] = [
    (0.1, 1.9029272709974641351),
    (0.2, 1.4661082731385164281),
    (0.3, 1.3205239288946441833),
    (0.4, 1.2747889939546534411),
    (0.5, 1.2834433931462391178),
    (0.6, 1.3314317011302075109),
    (0.7, 1.4142781310540414399),
    (0.8, 1.5327402871711554821),
    (0.9, 1.6911852515563525555),
    (1.0, 1.8973243898935668663),
    (1.1, 2.1626696865991234509),
    (1.2, 2.5035769024100356602),
    (1.3, 2.9429558248246835181),
    (1.4, 3.5128838671586718886),
    (1.5, 4.258539280440437764),
    (1.6, 5.2441307088644301865),
    (1.7, 6.5619091426042985612),
    (1.8, 8.3460132023198077503),
    (1.9, 10.793999043553139283),
    (2.0, 14.200754170851699667),
];

pub const ML_0P7_0P3: f64 = 1.4168633258774752933;
pub const ML_0P5_NEG1: f64 = 0.42758357615580700441;
pub const ML_1P5_2: f64 = 3.3487008963183954036;
