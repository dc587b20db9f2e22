fn main() {
    println!("braidwalk");
}
