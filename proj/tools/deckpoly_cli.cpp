#include <iostream>

int main() {
    std::cout << "deckpoly cli placeholder\n";
    return 0;
}
