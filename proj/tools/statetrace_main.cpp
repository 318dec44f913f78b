// Placeholder; replaced by the full CLI once the library modules are in.
int main() { return 0; }
