fn main() {
    println!("polariton CLI: under construction");
}
