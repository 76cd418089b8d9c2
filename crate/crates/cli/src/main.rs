fn main() {
    println!("orefactor");
}
