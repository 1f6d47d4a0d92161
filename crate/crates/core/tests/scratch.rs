use fkbe_core::jet::Jet;
use fkbe_core::solution::*;

#[test]
fn debug_invsq() {
    let th = stationary_power(0.75, true).unwrap();
    let u = sol_invsq(0.0, &th, Eps::SgnX).unwrap();
    let p = [0.3, 0.7, -0.2];
    let j = u.jet(p, 3).unwrap();
    println!("value = {} (expect {})", j.value(), 2.0_f64.powf(1.5) * 0.7);
    println!("u_t  = {:?}", j.derivative([1,0,0]));
    println!("u_x  = {:?}", j.derivative([0,1,0]));
    println!("u_y  = {:?}", j.derivative([0,0,1]));
    println!("u_xx = {:?}", j.derivative([0,2,0]));

    let vars = Jet::vars(3, &p);
    let x = vars[1].clone();
    let ax = x.abs_branch().unwrap();
    let i2 = ax.sqrt().unwrap().scale(2.0);
    println!("i2 value = {} deriv = {:?}", i2.value(), i2.derivative([0,1,0]));
    let tj = th.fn2.jet([-0.2, i2.value()], 3).unwrap();
    println!("theta value at z2 = {}: {} (expect {})", i2.value(), tj.value(), i2.value().powf(1.5));
    println!("theta d1 = {:?} d2 = {:?}", tj.derivative([1,0,0]), tj.derivative([0,1,0]));
}
